#include "scd/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "scd/encoder.hpp"
#include "scd/errors.hpp"
#include "scd/projector.hpp"

namespace scd {

CorrelationMode correlation_mode_from_name(const std::string& name) {
  if (name == "cosine") return CorrelationMode::cosine;
  if (name == "elementwise") return CorrelationMode::elementwise;
  throw config_error("unknown correlation mode: " + name);
}

const char* correlation_mode_name(CorrelationMode m) {
  return m == CorrelationMode::cosine ? "cosine" : "elementwise";
}

LossMode loss_mode_from_name(const std::string& name) {
  if (name == "joint") return LossMode::joint;
  if (name == "ls_only") return LossMode::ls_only;
  if (name == "lc_only") return LossMode::lc_only;
  throw config_error("unknown loss mode: " + name);
}

const char* loss_mode_name(LossMode m) {
  switch (m) {
    case LossMode::joint: return "joint";
    case LossMode::ls_only: return "ls_only";
    case LossMode::lc_only: return "lc_only";
  }
  return "?";
}

double self_contrastive_loss(const Matrix& ha, const Matrix& hb,
                             Matrix* d_ha, Matrix* d_hb) {
  if (!ha.same_shape(hb))
    throw std::invalid_argument("self_contrastive_loss: shape mismatch");
  const std::size_t n = ha.rows();
  const std::size_t d = ha.cols();
  if (n == 0) throw std::invalid_argument("self_contrastive_loss: empty");

  if (d_ha) *d_ha = Matrix(n, d);
  if (d_hb) *d_hb = Matrix(n, d);

  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = ha.row(i).data();
    const double* b = hb.row(i).data();
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dot += a[j] * b[j];
      na2 += a[j] * a[j];
      nb2 += b[j] * b[j];
    }
    if (na2 == 0.0 || nb2 == 0.0)
      throw numeric_error("self_contrastive_loss: zero-norm embedding at row " +
                          std::to_string(i));
    const double na = std::sqrt(na2);
    const double nb = std::sqrt(nb2);
    const double cos = dot / (na * nb);
    total += cos;
    if (d_ha) {
      double* ga = d_ha->row(i).data();
      for (std::size_t j = 0; j < d; ++j)
        ga[j] = inv_n * (b[j] / (na * nb) - cos * a[j] / na2);
    }
    if (d_hb) {
      double* gb = d_hb->row(i).data();
      for (std::size_t j = 0; j < d; ++j)
        gb[j] = inv_n * (a[j] / (na * nb) - cos * b[j] / nb2);
    }
  }
  return total * inv_n;
}

Matrix cross_correlation(const Matrix& pa, const Matrix& pb,
                         CorrelationMode mode, CrossCorrCache* cache) {
  if (pa.rows() != pb.rows() || pa.cols() != pb.cols())
    throw std::invalid_argument("cross_correlation: shape mismatch");
  const std::size_t n = pa.rows();
  const std::size_t p = pa.cols();
  if (n == 0 || p == 0)
    throw std::invalid_argument("cross_correlation: empty input");

  Matrix c = matmul_at_b(pa, pb);  // numerators

  std::vector<double> na, nb;
  Matrix s;
  if (mode == CorrelationMode::cosine) {
    na.resize(p);
    nb.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
      double sa = 0.0, sb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sa += pa(i, j) * pa(i, j);
        sb += pb(i, j) * pb(i, j);
      }
      if (sa == 0.0)
        throw numeric_error("cross_correlation: feature column " +
                            std::to_string(j) + " of the first view is zero");
      if (sb == 0.0)
        throw numeric_error("cross_correlation: feature column " +
                            std::to_string(j) + " of the second view is zero");
      na[j] = std::sqrt(sa);
      nb[j] = std::sqrt(sb);
    }
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) c(j, k) /= na[j] * nb[k];
  } else {
    Matrix a2 = hadamard(pa, pa);
    Matrix b2 = hadamard(pb, pb);
    s = matmul_at_b(a2, b2);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) {
        const double denom = s(j, k);
        c(j, k) = denom > 0.0 ? c(j, k) / std::sqrt(denom) : 0.0;
      }
  }

  c.ensure_finite("cross-correlation");
  if (cache) {
    cache->a = pa;
    cache->b = pb;
    cache->c = c;
    cache->mode = mode;
    cache->col_norm_a = std::move(na);
    cache->col_norm_b = std::move(nb);
    cache->s = std::move(s);
  }
  return c;
}

void cross_correlation_backward(const CrossCorrCache& cache, const Matrix& d_c,
                                Matrix& d_pa, Matrix& d_pb) {
  const Matrix& a = cache.a;
  const Matrix& b = cache.b;
  const Matrix& c = cache.c;
  const std::size_t p = c.rows();
  if (!d_c.same_shape(c))
    throw std::invalid_argument("cross_correlation_backward: shape mismatch");

  if (cache.mode == CorrelationMode::cosine) {
    const auto& na = cache.col_norm_a;
    const auto& nb = cache.col_norm_b;
    // g_jk = d_c_jk / (na_j nb_k); row/column dots of d_c with c give the
    // norm-coupling terms.
    Matrix g(p, p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) g(j, k) = d_c(j, k) / (na[j] * nb[k]);

    d_pa = matmul_a_bt(b, g);  // sum_k b_ik g_jk
    d_pb = matmul(a, g);       // sum_j a_ij g_jk
    std::vector<double> row_dot(p), col_dot(p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) {
        row_dot[j] += d_c(j, k) * c(j, k);
        col_dot[k] += d_c(j, k) * c(j, k);
      }
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < p; ++j) {
        d_pa(i, j) -= a(i, j) * row_dot[j] / (na[j] * na[j]);
        d_pb(i, j) -= b(i, j) * col_dot[j] / (nb[j] * nb[j]);
      }
  } else {
    const Matrix& s = cache.s;
    Matrix u(p, p);  // d_c / sqrt(s)
    Matrix v(p, p);  // d_c * c / s
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) {
        if (s(j, k) > 0.0) {
          u(j, k) = d_c(j, k) / std::sqrt(s(j, k));
          v(j, k) = d_c(j, k) * c(j, k) / s(j, k);
        }
      }
    Matrix b2 = hadamard(b, b);
    Matrix a2 = hadamard(a, a);
    d_pa = sub(matmul_a_bt(b, u), hadamard(a, matmul_a_bt(b2, v)));
    d_pb = sub(matmul(a, u), hadamard(b, matmul(a2, v)));
  }
}

double decorrelation_loss(const Matrix& c, double lambda, bool negate_diagonal,
                          Matrix* d_c, double* invariance,
                          double* redundancy) {
  if (c.rows() != c.cols())
    throw std::invalid_argument("decorrelation_loss: matrix must be square");
  const std::size_t p = c.rows();
  const double diag_sign = negate_diagonal ? -1.0 : 1.0;

  if (d_c) *d_c = Matrix(p, p);
  double diag = 0.0, off = 0.0;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      if (j == k) {
        const double r = 1.0 - c(j, j);
        diag += r * r;
        if (d_c) (*d_c)(j, j) = diag_sign * -2.0 * r;
      } else {
        off += c(j, k) * c(j, k);
        if (d_c) (*d_c)(j, k) = 2.0 * lambda * c(j, k);
      }
    }
  if (invariance) *invariance = diag_sign * diag;
  if (redundancy) *redundancy = lambda * off;
  return diag_sign * diag + lambda * off;
}

LossBreakdown scd_objective(const Matrix& ha, const Matrix& hb,
                            const Matrix* pa, const Matrix* pb,
                            const Hyperparams& hp, LossMode mode,
                            ObjectiveGrads* grads) {
  LossBreakdown out;
  out.alpha = hp.alpha;
  out.lambda = hp.lambda;

  if (grads) {
    grads->d_ha = Matrix(ha.rows(), ha.cols());
    grads->d_hb = Matrix(hb.rows(), hb.cols());
    grads->d_pa = Matrix();
    grads->d_pb = Matrix();
  }

  if (mode != LossMode::lc_only) {
    out.l_s = self_contrastive_loss(ha, hb, grads ? &grads->d_ha : nullptr,
                                    grads ? &grads->d_hb : nullptr);
  }

  if (mode != LossMode::ls_only) {
    if (!pa || !pb)
      throw std::invalid_argument(
          "scd_objective: projections required unless ls_only");
    CrossCorrCache cc;
    Matrix c = cross_correlation(*pa, *pb, hp.correlation,
                                 grads ? &cc : nullptr);
    Matrix d_c;
    out.l_c = decorrelation_loss(c, hp.lambda, hp.negate_diagonal,
                                 grads ? &d_c : nullptr, &out.l_c_invariance,
                                 &out.l_c_redundancy);
    if (grads) {
      for (std::size_t i = 0; i < d_c.size(); ++i)
        d_c.data()[i] *= hp.alpha;
      cross_correlation_backward(cc, d_c, grads->d_pa, grads->d_pb);
    }
  }

  out.total = out.l_s + hp.alpha * out.l_c;
  return out;
}

JointLossResult joint_loss(const SentenceBatch& batch, ModelParams& params,
                           const Hyperparams& hp, RngState rng,
                           LossMode mode) {
  JointLossResult res;
  res.d_encoder = zero_grads(params.encoder);
  res.d_projector = zero_grads(params.projector);

  EncoderCache ca, cb;
  EncodedPair h =
      encode_pair(params.encoder, batch, hp.rate_a, hp.rate_b, rng, &ca, &cb);

  Matrix pa, pb;
  ProjectorCache pca, pcb;
  const bool run_projector = mode != LossMode::ls_only;
  if (run_projector) {
    pa = project(params.projector, h.a, /*training=*/true, &pca);
    pb = project(params.projector, h.b, /*training=*/true, &pcb);
  }

  ObjectiveGrads og;
  res.loss = scd_objective(h.a, h.b, run_projector ? &pa : nullptr,
                           run_projector ? &pb : nullptr, hp, mode, &og);

  Matrix d_ha = std::move(og.d_ha);
  Matrix d_hb = std::move(og.d_hb);
  if (run_projector) {
    add_in_place(d_ha, project_backward(params.projector, pca, og.d_pa,
                                        res.d_projector));
    add_in_place(d_hb, project_backward(params.projector, pcb, og.d_pb,
                                        res.d_projector));
  }
  encode_backward(params.encoder, ca, d_ha, res.d_encoder);
  encode_backward(params.encoder, cb, d_hb, res.d_encoder);
  return res;
}

}  // namespace scd
