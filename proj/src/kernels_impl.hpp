#pragma once

// Internal: per-ISA kernel entry points used by the dispatch table.

#include <cstddef>
#include <cstdint>

namespace scd::kernels {

#define SCD_KERNEL_DECLS(ns)                                                   \
  namespace ns {                                                               \
  double dot(const double* a, const double* b, std::size_t n);                 \
  double sum(const double* x, std::size_t n);                                  \
  double sum_squares(const double* x, std::size_t n);                          \
  void add(const double* a, const double* b, double* out, std::size_t n);      \
  void sub(const double* a, const double* b, double* out, std::size_t n);      \
  void hadamard(const double* a, const double* b, double* out, std::size_t n); \
  void axpy(double alpha, const double* x, double* y, std::size_t n);          \
  void scale(double* x, std::size_t n, double alpha);                          \
  void matmul(const double* a, const double* b, double* c, std::size_t n,      \
              std::size_t k, std::size_t m);                                   \
  void matmul_at_b(const double* a, const double* b, double* c,                \
                   std::size_t n, std::size_t k, std::size_t m);               \
  void matmul_a_bt(const double* a, const double* b, double* c,                \
                   std::size_t n, std::size_t m, std::size_t k);               \
  void dropout_apply(const double* x, const std::uint8_t* keep,                \
                     double keep_scale, double* out, std::size_t n);           \
  void relu(const double* x, double* out, std::size_t n);                      \
  void relu_backward(const double* pre, const double* dout, double* dx,        \
                     std::size_t n);                                           \
  float dotf(const float* a, const float* b, std::size_t n);                   \
  float sumf(const float* x, std::size_t n);                                   \
  float sum_squaresf(const float* x, std::size_t n);                           \
  void addf(const float* a, const float* b, float* out, std::size_t n);        \
  void subf(const float* a, const float* b, float* out, std::size_t n);        \
  void hadamardf(const float* a, const float* b, float* out, std::size_t n);   \
  void axpyf(float alpha, const float* x, float* y, std::size_t n);            \
  void scalef(float* x, std::size_t n, float alpha);                           \
  void matmulf(const float* a, const float* b, float* c, std::size_t n,        \
               std::size_t k, std::size_t m);                                  \
  void dropout_applyf(const float* x, const std::uint8_t* keep,                \
                      float keep_scale, float* out, std::size_t n);            \
  void reluf(const float* x, float* out, std::size_t n);                       \
  }

SCD_KERNEL_DECLS(scalar_impl)
SCD_KERNEL_DECLS(avx2_impl)

#undef SCD_KERNEL_DECLS

}  // namespace scd::kernels
