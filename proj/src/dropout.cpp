#include "scd/dropout.hpp"

#include <stdexcept>
#include <string>

namespace scd {

DropoutMask sample_dropout_mask(std::size_t rows, std::size_t cols,
                                double rate, RngState& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw std::invalid_argument("dropout rate must be in [0, 1), got " +
                                std::to_string(rate));
  DropoutMask mask;
  mask.rows = rows;
  mask.cols = cols;
  mask.rate = rate;
  mask.keep_scale = 1.0 / (1.0 - rate);
  mask.keep.resize(rows * cols);
  if (rate == 0.0) {
    for (auto& k : mask.keep) k = 1;
    return mask;
  }
  // P(u >= rate) = 1 - rate for u uniform on [0, 1)
  for (auto& k : mask.keep) k = rng.next_double() >= rate ? 1 : 0;
  return mask;
}

namespace {
template <typename T>
MatrixT<T> apply_impl(const MatrixT<T>& x, const DropoutMask& mask) {
  if (x.rows() != mask.rows || x.cols() != mask.cols)
    throw std::invalid_argument("apply_dropout: mask shape " +
                                detail::shape_str(mask.rows, mask.cols) +
                                " does not match input " +
                                detail::shape_str(x.rows(), x.cols()));
  MatrixT<T> out(x.rows(), x.cols());
  kernels::dropout_apply(x.data(), mask.keep.data(),
                         static_cast<T>(mask.keep_scale), out.data(),
                         x.size());
  out.ensure_finite("apply_dropout");
  return out;
}
}  // namespace

Matrix apply_dropout(const Matrix& x, const DropoutMask& mask) {
  return apply_impl(x, mask);
}

Matrix32 apply_dropout(const Matrix32& x, const DropoutMask& mask) {
  return apply_impl(x, mask);
}

}  // namespace scd
