#include "scd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace scd::kernels {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
  void (*add)(const double*, const double*, double*, std::size_t);
  void (*sub)(const double*, const double*, double*, std::size_t);
  void (*hadamard)(const double*, const double*, double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, std::size_t, double);
  void (*matmul)(const double*, const double*, double*, std::size_t,
                 std::size_t, std::size_t);
  void (*matmul_at_b)(const double*, const double*, double*, std::size_t,
                      std::size_t, std::size_t);
  void (*matmul_a_bt)(const double*, const double*, double*, std::size_t,
                      std::size_t, std::size_t);
  void (*dropout_apply)(const double*, const std::uint8_t*, double, double*,
                        std::size_t);
  void (*relu)(const double*, double*, std::size_t);
  void (*relu_backward)(const double*, const double*, double*, std::size_t);
  float (*dotf)(const float*, const float*, std::size_t);
  float (*sumf)(const float*, std::size_t);
  float (*sum_squaresf)(const float*, std::size_t);
  void (*addf)(const float*, const float*, float*, std::size_t);
  void (*subf)(const float*, const float*, float*, std::size_t);
  void (*hadamardf)(const float*, const float*, float*, std::size_t);
  void (*axpyf)(float, const float*, float*, std::size_t);
  void (*scalef)(float*, std::size_t, float);
  void (*matmulf)(const float*, const float*, float*, std::size_t, std::size_t,
                  std::size_t);
  void (*dropout_applyf)(const float*, const std::uint8_t*, float, float*,
                         std::size_t);
  void (*reluf)(const float*, float*, std::size_t);
};

#define SCD_FILL_TABLE(ns)                                                  \
  {                                                                         \
    ns::dot, ns::sum, ns::sum_squares, ns::add, ns::sub, ns::hadamard,      \
        ns::axpy, ns::scale, ns::matmul, ns::matmul_at_b, ns::matmul_a_bt,  \
        ns::dropout_apply, ns::relu, ns::relu_backward, ns::dotf, ns::sumf, \
        ns::sum_squaresf, ns::addf, ns::subf, ns::hadamardf, ns::axpyf,     \
        ns::scalef, ns::matmulf, ns::dropout_applyf, ns::reluf              \
  }

constexpr Table kScalarTable = SCD_FILL_TABLE(scalar_impl);
constexpr Table kAvx2Table = SCD_FILL_TABLE(avx2_impl);

#undef SCD_FILL_TABLE

const Table* g_table = nullptr;
Isa g_isa = Isa::scalar;

void activate(Isa isa) {
  g_isa = isa;
  g_table = (isa == Isa::avx2) ? &kAvx2Table : &kScalarTable;
}

const Table& table() {
  if (!g_table) activate(detect_isa());
  return *g_table;
}

}  // namespace

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Isa detect_isa() {
  if (const char* env = std::getenv("SCD_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2") {
      if (!isa_supported(Isa::avx2))
        throw std::runtime_error("SCD_SIMD=avx2 but the CPU lacks AVX2");
      return Isa::avx2;
    }
    if (!v.empty() && v != "auto")
      throw std::runtime_error("unknown SCD_SIMD value: " + v);
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() {
  table();
  return g_isa;
}

void set_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::runtime_error(std::string("unsupported ISA: ") + isa_name(isa));
  activate(isa);
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

double dot(const double* a, const double* b, std::size_t n) {
  return table().dot(a, b, n);
}
double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double sum_squares(const double* x, std::size_t n) {
  return table().sum_squares(x, n);
}
void add(const double* a, const double* b, double* out, std::size_t n) {
  table().add(a, b, out, n);
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  table().sub(a, b, out, n);
}
void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  table().hadamard(a, b, out, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy(alpha, x, y, n);
}
void scale(double* x, std::size_t n, double alpha) {
  table().scale(x, n, alpha);
}
void matmul(const double* a, const double* b, double* c, std::size_t n,
            std::size_t k, std::size_t m) {
  table().matmul(a, b, c, n, k, m);
}
void matmul_at_b(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t k, std::size_t m) {
  table().matmul_at_b(a, b, c, n, k, m);
}
void matmul_a_bt(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t m, std::size_t k) {
  table().matmul_a_bt(a, b, c, n, m, k);
}
void dropout_apply(const double* x, const std::uint8_t* keep,
                   double keep_scale, double* out, std::size_t n) {
  table().dropout_apply(x, keep, keep_scale, out, n);
}
void relu(const double* x, double* out, std::size_t n) {
  table().relu(x, out, n);
}
void relu_backward(const double* pre, const double* dout, double* dx,
                   std::size_t n) {
  table().relu_backward(pre, dout, dx, n);
}

float dot(const float* a, const float* b, std::size_t n) {
  return table().dotf(a, b, n);
}
float sum(const float* x, std::size_t n) { return table().sumf(x, n); }
float sum_squares(const float* x, std::size_t n) {
  return table().sum_squaresf(x, n);
}
void add(const float* a, const float* b, float* out, std::size_t n) {
  table().addf(a, b, out, n);
}
void sub(const float* a, const float* b, float* out, std::size_t n) {
  table().subf(a, b, out, n);
}
void hadamard(const float* a, const float* b, float* out, std::size_t n) {
  table().hadamardf(a, b, out, n);
}
void axpy(float alpha, const float* x, float* y, std::size_t n) {
  table().axpyf(alpha, x, y, n);
}
void scale(float* x, std::size_t n, float alpha) {
  table().scalef(x, n, alpha);
}
void matmul(const float* a, const float* b, float* c, std::size_t n,
            std::size_t k, std::size_t m) {
  table().matmulf(a, b, c, n, k, m);
}
void dropout_apply(const float* x, const std::uint8_t* keep, float keep_scale,
                   float* out, std::size_t n) {
  table().dropout_applyf(x, keep, keep_scale, out, n);
}
void relu(const float* x, float* out, std::size_t n) {
  table().reluf(x, out, n);
}

}  // namespace scd::kernels
