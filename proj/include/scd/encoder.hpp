#pragma once

#include <vector>

#include "scd/dropout.hpp"
#include "scd/matrix.hpp"
#include "scd/model.hpp"
#include "scd/rng.hpp"
#include "scd/vocab.hpp"

namespace scd {

/// Everything encode() saw that encode_backward() needs again.
struct EncoderCache {
  std::size_t n = 0;
  std::size_t max_len = 0;
  std::vector<int> ids;
  std::vector<std::size_t> lengths;
  DropoutMask emb_mask;
  Matrix pooled;                        // after embedding dropout
  std::vector<Matrix> block_inputs;     // x_f; x_0 == pooled
  std::vector<Matrix> activations;      // act(x_f W_f + b_f)
  std::vector<DropoutMask> block_masks;
};

/// Embeds tokens, applies elementwise dropout, mean-pools over the non-pad
/// positions, then runs the feed-forward blocks with dropout after each
/// activation. One dropout rate drives the whole pass, standing in for a
/// per-layer rate. Rate 0 is the deterministic inference path.
///
/// Mask streams derive from `rng` alone, so the same (seed, stream) pair
/// reproduces the view exactly.
Matrix encode(const EncoderParams& p, const SentenceBatch& batch,
              double dropout_rate, RngState rng,
              EncoderCache* cache = nullptr);

/// Two dropout views of the same batch. The second rate must be strictly
/// larger than the first; the views use disjoint mask streams.
struct EncodedPair {
  Matrix a;
  Matrix b;
};
EncodedPair encode_pair(const EncoderParams& p, const SentenceBatch& batch,
                        double rate_a, double rate_b, RngState rng,
                        EncoderCache* cache_a = nullptr,
                        EncoderCache* cache_b = nullptr);

/// Accumulates dL/d(params) into `grads` given dL/d(output). Pad positions
/// contribute nothing, so their embedding rows keep zero gradient.
void encode_backward(const EncoderParams& p, const EncoderCache& cache,
                     const Matrix& d_output, EncoderGrads& grads);

}  // namespace scd
