#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scd/errors.hpp"
#include "scd/kernels.hpp"

namespace scd {

/// Dense row-major matrix. Double precision is the training substrate;
/// the float instantiation exists as an optional speed mode for the
/// low-level kernels only.
template <typename T>
class MatrixT {
 public:
  MatrixT() = default;
  MatrixT(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static MatrixT zeros(std::size_t rows, std::size_t cols) {
    return MatrixT(rows, cols);
  }

  static MatrixT full(std::size_t rows, std::size_t cols, T value) {
    MatrixT m(rows, cols);
    for (auto& v : m.data_) v = value;
    return m;
  }

  static MatrixT identity(std::size_t n) {
    MatrixT m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  bool same_shape(const MatrixT& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool all_finite() const {
    for (const T v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  // Public operations promise finite outputs; violations surface here.
  void ensure_finite(const char* what) const {
    if (!all_finite())
      throw numeric_error(std::string(what) + ": non-finite matrix entry");
  }

  void fill(T value) {
    for (auto& v : data_) v = value;
  }

  friend bool operator==(const MatrixT& a, const MatrixT& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = MatrixT<double>;
using Matrix32 = MatrixT<float>;

namespace detail {
inline std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}
}  // namespace detail

/// C = A . B. Throws on inner-dimension mismatch or non-finite result.
template <typename T>
MatrixT<T> matmul(const MatrixT<T>& a, const MatrixT<T>& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: dimension mismatch " +
                                detail::shape_str(a.rows(), a.cols()) + " x " +
                                detail::shape_str(b.rows(), b.cols()));
  MatrixT<T> c(a.rows(), b.cols());
  kernels::matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  c.ensure_finite("matmul");
  return c;
}

/// C = A^T . B (A is n x k, B is n x m, result k x m).
inline Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("matmul_at_b: row count mismatch");
  Matrix c(a.cols(), b.cols());
  kernels::matmul_at_b(a.data(), b.data(), c.data(), a.rows(), a.cols(),
                       b.cols());
  c.ensure_finite("matmul_at_b");
  return c;
}

/// C = A . B^T (A is n x m, B is k x m, result n x k).
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("matmul_a_bt: column count mismatch");
  Matrix c(a.rows(), b.rows());
  kernels::matmul_a_bt(a.data(), b.data(), c.data(), a.rows(), a.cols(),
                       b.rows());
  c.ensure_finite("matmul_a_bt");
  return c;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("add: shape mismatch");
  Matrix c(a.rows(), a.cols());
  kernels::add(a.data(), b.data(), c.data(), a.size());
  c.ensure_finite("add");
  return c;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("sub: shape mismatch");
  Matrix c(a.rows(), a.cols());
  kernels::sub(a.data(), b.data(), c.data(), a.size());
  c.ensure_finite("sub");
  return c;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("hadamard: shape mismatch");
  Matrix c(a.rows(), a.cols());
  kernels::hadamard(a.data(), b.data(), c.data(), a.size());
  c.ensure_finite("hadamard");
  return c;
}

inline void add_in_place(Matrix& a, const Matrix& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("add_in_place: shape mismatch");
  kernels::axpy(1.0, b.data(), a.data(), a.size());
}

inline void axpy_in_place(Matrix& y, double alpha, const Matrix& x) {
  if (!y.same_shape(x))
    throw std::invalid_argument("axpy_in_place: shape mismatch");
  kernels::axpy(alpha, x.data(), y.data(), y.size());
}

inline Matrix scaled(const Matrix& a, double alpha) {
  Matrix c = a;
  kernels::scale(c.data(), c.size(), alpha);
  c.ensure_finite("scale");
  return c;
}

inline double row_norm(const Matrix& a, std::size_t i) {
  return std::sqrt(kernels::sum_squares(a.data() + i * a.cols(), a.cols()));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace scd
