#include "scd/encoder.hpp"

#include <cmath>
#include <string>

#include "scd/errors.hpp"

namespace scd {

namespace {

double activate(Nonlinearity f, double z) {
  switch (f) {
    case Nonlinearity::tanh_fn: return std::tanh(z);
    case Nonlinearity::relu_fn: return z > 0.0 ? z : 0.0;
    case Nonlinearity::identity_fn: return z;
  }
  return z;
}

// Derivative expressed through the activation value, which is all the
// cache keeps.
double activate_grad(Nonlinearity f, double a) {
  switch (f) {
    case Nonlinearity::tanh_fn: return 1.0 - a * a;
    case Nonlinearity::relu_fn: return a > 0.0 ? 1.0 : 0.0;
    case Nonlinearity::identity_fn: return 1.0;
  }
  return 1.0;
}

Matrix linear(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix z = matmul(x, w);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b(0, j);
  return z;
}

}  // namespace

Matrix encode(const EncoderParams& p, const SentenceBatch& batch,
              double dropout_rate, RngState rng, EncoderCache* cache) {
  const std::size_t n = batch.n;
  const std::size_t len = batch.max_len;
  const std::size_t e = p.embed_dim();
  if (n == 0) throw data_error("encode: empty batch");

  Matrix tokens(n * len, e);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < batch.lengths[i]; ++t) {
      const int id = batch.id(i, t);
      if (id < 0 || static_cast<std::size_t>(id) >= p.vocab_size())
        throw data_error("encode: token id " + std::to_string(id) +
                         " outside vocabulary of size " +
                         std::to_string(p.vocab_size()));
      const auto src = p.embedding.row(id);
      double* dst = tokens.row(i * len + t).data();
      for (std::size_t j = 0; j < e; ++j) dst[j] = src[j];
    }
  }

  RngState emb_rng = rng.child(1);
  DropoutMask emb_mask = sample_dropout_mask(n * len, e, dropout_rate, emb_rng);
  Matrix dropped = apply_dropout(tokens, emb_mask);

  Matrix pooled(n, e);
  for (std::size_t i = 0; i < n; ++i) {
    const double inv = 1.0 / static_cast<double>(batch.lengths[i]);
    double* out = pooled.row(i).data();
    for (std::size_t t = 0; t < batch.lengths[i]; ++t) {
      const double* src = dropped.row(i * len + t).data();
      for (std::size_t j = 0; j < e; ++j) out[j] += src[j];
    }
    for (std::size_t j = 0; j < e; ++j) out[j] *= inv;
  }

  if (cache) {
    cache->n = n;
    cache->max_len = len;
    cache->ids = batch.ids;
    cache->lengths = batch.lengths;
    cache->emb_mask = emb_mask;
    cache->pooled = pooled;
    cache->block_inputs.clear();
    cache->activations.clear();
    cache->block_masks.clear();
  }

  Matrix x = pooled;
  for (std::size_t f = 0; f < p.blocks.size(); ++f) {
    if (cache) cache->block_inputs.push_back(x);
    Matrix a = linear(x, p.blocks[f].weight, p.blocks[f].bias);
    for (std::size_t i = 0; i < a.size(); ++i)
      a.data()[i] = activate(p.activation, a.data()[i]);
    if (cache) cache->activations.push_back(a);
    RngState blk_rng = rng.child(2 + f);
    DropoutMask m =
        sample_dropout_mask(a.rows(), a.cols(), dropout_rate, blk_rng);
    if (cache) cache->block_masks.push_back(m);
    x = apply_dropout(a, m);
  }
  x.ensure_finite("encoder output");
  return x;
}

EncodedPair encode_pair(const EncoderParams& p, const SentenceBatch& batch,
                        double rate_a, double rate_b, RngState rng,
                        EncoderCache* cache_a, EncoderCache* cache_b) {
  if (!(rate_a < rate_b))
    throw config_error("encode_pair: first view rate must be below the "
                       "second (got " + std::to_string(rate_a) + " and " +
                       std::to_string(rate_b) + ")");
  EncodedPair out;
  out.a = encode(p, batch, rate_a, rng.child(1), cache_a);
  out.b = encode(p, batch, rate_b, rng.child(2), cache_b);
  return out;
}

void encode_backward(const EncoderParams& p, const EncoderCache& cache,
                     const Matrix& d_output, EncoderGrads& grads) {
  const std::size_t n = cache.n;
  const std::size_t len = cache.max_len;
  const std::size_t e = p.embed_dim();

  Matrix d_cur = d_output;
  for (std::size_t fi = p.blocks.size(); fi-- > 0;) {
    Matrix da = apply_dropout(d_cur, cache.block_masks[fi]);
    Matrix dz(da.rows(), da.cols());
    const Matrix& a = cache.activations[fi];
    for (std::size_t i = 0; i < dz.size(); ++i)
      dz.data()[i] = da.data()[i] * activate_grad(p.activation, a.data()[i]);

    add_in_place(grads.blocks[fi].weight,
                 matmul_at_b(cache.block_inputs[fi], dz));
    for (std::size_t j = 0; j < dz.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < dz.rows(); ++i) s += dz(i, j);
      grads.blocks[fi].bias(0, j) += s;
    }
    d_cur = matmul_a_bt(dz, p.blocks[fi].weight);
  }

  const DropoutMask& m = cache.emb_mask;
  for (std::size_t i = 0; i < n; ++i) {
    const double inv = 1.0 / static_cast<double>(cache.lengths[i]);
    const double* dp = d_cur.row(i).data();
    for (std::size_t t = 0; t < cache.lengths[i]; ++t) {
      const std::size_t r = i * len + t;
      double* dst = grads.embedding.row(cache.ids[r]).data();
      for (std::size_t j = 0; j < e; ++j) {
        const double g =
            m.keep[r * e + j] ? dp[j] * inv * m.keep_scale : 0.0;
        dst[j] += g;
      }
    }
  }
}

}  // namespace scd
