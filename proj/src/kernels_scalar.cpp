// Reference kernels. The reductions use the blocked accumulation orders
// documented in kernels.hpp; the vector variants replicate them lane for
// lane, so both paths agree bitwise.

#include <cstring>

#include "kernels_impl.hpp"

namespace scd::kernels::scalar_impl {

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i];
    s1 += x[i + 1];
    s2 += x[i + 2];
    s3 += x[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_squares(const double* x, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * x[i];
    s1 += x[i + 1] * x[i + 1];
    s2 += x[i + 2] * x[i + 2];
    s3 += x[i + 3] * x[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double* x, std::size_t n, double alpha) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matmul(const double* a, const double* b, double* c, std::size_t n,
            std::size_t k, std::size_t m) {
  std::memset(c, 0, n * m * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = c + i * m;
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_at_b(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t k, std::size_t m) {
  std::memset(c, 0, k * m * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * k;
    const double* brow = b + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      double* crow = c + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_a_bt(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t m, std::size_t k) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * m;
    double* crow = c + i * k;
    for (std::size_t j = 0; j < k; ++j) crow[j] = dot(arow, b + j * m, m);
  }
}

void dropout_apply(const double* x, const std::uint8_t* keep,
                   double keep_scale, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = keep[i] ? x[i] * keep_scale : 0.0;
}

void relu(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* pre, const double* dout, double* dx,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = pre[i] > 0.0 ? dout[i] : 0.0;
}

// float reductions interleave eight partial sums, matching the 8-lane
// single-precision vector width.
float dotf(const float* a, const float* b, std::size_t n) {
  float s[8] = {0.f};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t l = 0; l < 8; ++l) s[l] += a[i + l] * b[i + l];
  float r = ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7]));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

float sumf(const float* x, std::size_t n) {
  float s[8] = {0.f};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t l = 0; l < 8; ++l) s[l] += x[i + l];
  float r = ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7]));
  for (; i < n; ++i) r += x[i];
  return r;
}

float sum_squaresf(const float* x, std::size_t n) {
  float s[8] = {0.f};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t l = 0; l < 8; ++l) s[l] += x[i + l] * x[i + l];
  float r = ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7]));
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

void addf(const float* a, const float* b, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void subf(const float* a, const float* b, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void hadamardf(const float* a, const float* b, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpyf(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scalef(float* x, std::size_t n, float alpha) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matmulf(const float* a, const float* b, float* c, std::size_t n,
             std::size_t k, std::size_t m) {
  std::memset(c, 0, n * m * sizeof(float));
  for (std::size_t i = 0; i < n; ++i) {
    float* crow = c + i * m;
    const float* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const float av = arow[p];
      const float* brow = b + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void dropout_applyf(const float* x, const std::uint8_t* keep, float keep_scale,
                    float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = keep[i] ? x[i] * keep_scale : 0.f;
}

void reluf(const float* x, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.f ? x[i] : 0.f;
}

}  // namespace scd::kernels::scalar_impl
