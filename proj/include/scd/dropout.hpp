#pragma once

#include <cstdint>
#include <vector>

#include "scd/matrix.hpp"
#include "scd/rng.hpp"

namespace scd {

/// Inverted-dropout mask: kept entries are rescaled by 1/(1-rate) at
/// sampling time so the masked signal matches the unmasked one in
/// expectation and rate-0 forward passes need no special casing.
struct DropoutMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double rate = 0.0;
  double keep_scale = 1.0;
  std::vector<std::uint8_t> keep;  // 1 = keep, 0 = drop

  std::size_t size() const { return keep.size(); }
};

/// Each entry kept independently with probability 1-rate.
/// Throws std::invalid_argument unless rate is in [0, 1).
DropoutMask sample_dropout_mask(std::size_t rows, std::size_t cols,
                                double rate, RngState& rng);

/// Applies the mask: kept entries scaled by keep_scale, dropped zeroed.
Matrix apply_dropout(const Matrix& x, const DropoutMask& mask);
Matrix32 apply_dropout(const Matrix32& x, const DropoutMask& mask);

}  // namespace scd
