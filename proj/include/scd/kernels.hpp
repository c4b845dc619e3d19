#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace scd::kernels {

// Instruction set used by the dense inner loops. The scalar kernels are the
// reference; vectorized variants must produce bit-identical results, which
// the kernel contracts below make possible:
//
//   * elementwise kernels have no ordering freedom at all,
//   * row reductions (dot, sum, sum_squares) accumulate in four interleaved
//     partial sums combined as ((s0+s1)+(s2+s3)), then fold the tail in
//     index order,
//   * matmul variants accumulate each output element strictly in k-order.
//
// Kernel translation units are compiled with -ffp-contract=off so neither
// path silently fuses multiply+add.
enum class Isa {
  scalar,
  avx2,
};

// True when the running CPU can execute kernels for `isa`.
bool isa_supported(Isa isa);

// Picks the widest supported ISA, honoring the SCD_SIMD environment
// variable ("scalar", "avx2", "auto").
Isa detect_isa();

Isa active_isa();
void set_isa(Isa isa);  // throws std::runtime_error if unsupported
const char* isa_name(Isa isa);

// ---- double precision (training path) ----

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);

void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* x, std::size_t n, double alpha);

// C (n x m) = A (n x k) . B (k x m), all row-major. C is overwritten.
void matmul(const double* a, const double* b, double* c, std::size_t n,
            std::size_t k, std::size_t m);
// C (k x m) = A^T . B with A stored n x k, B stored n x m.
void matmul_at_b(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t k, std::size_t m);
// C (n x k) = A . B^T with A stored n x m, B stored k x m.
void matmul_a_bt(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t m, std::size_t k);

// out[i] = keep[i] ? x[i] * keep_scale : 0
void dropout_apply(const double* x, const std::uint8_t* keep,
                   double keep_scale, double* out, std::size_t n);

void relu(const double* x, double* out, std::size_t n);
// dx[i] = pre[i] > 0 ? dout[i] : 0
void relu_backward(const double* pre, const double* dout, double* dx,
                   std::size_t n);

// ---- single precision (optional speed mode, substrate only) ----

float dot(const float* a, const float* b, std::size_t n);
float sum(const float* x, std::size_t n);
float sum_squares(const float* x, std::size_t n);
void add(const float* a, const float* b, float* out, std::size_t n);
void sub(const float* a, const float* b, float* out, std::size_t n);
void hadamard(const float* a, const float* b, float* out, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float* x, std::size_t n, float alpha);
void matmul(const float* a, const float* b, float* c, std::size_t n,
            std::size_t k, std::size_t m);
void dropout_apply(const float* x, const std::uint8_t* keep, float keep_scale,
                   float* out, std::size_t n);
void relu(const float* x, float* out, std::size_t n);

}  // namespace scd::kernels
