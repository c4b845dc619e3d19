// AVX2 kernel variants. Compiled with -mavx2 (and -ffp-contract=off); only
// reached through the dispatch table after a runtime CPU check.
//
// Dropped/negative lanes are zeroed with bitwise AND so the result is +0.0,
// exactly as the scalar reference writes it. Multiplies and adds stay
// unfused to keep bitwise agreement with the scalar path.

#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cstring>

namespace scd::kernels::avx2_impl {

namespace {

inline double hsum4(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

inline float hsum8(__m256 v) {
  alignas(32) float t[8];
  _mm256_store_ps(t, v);
  return ((t[0] + t[1]) + (t[2] + t[3])) + ((t[4] + t[5]) + (t[6] + t[7]));
}

// 4 keep bytes -> lane mask of all-ones / all-zeros
inline __m256d keep_mask4(const std::uint8_t* keep) {
  std::uint32_t packed;
  std::memcpy(&packed, keep, 4);
  __m128i bytes = _mm_cvtsi32_si128(static_cast<int>(packed));
  __m256i lanes = _mm256_cvtepu8_epi64(bytes);
  __m256i nz = _mm256_cmpgt_epi64(lanes, _mm256_setzero_si256());
  return _mm256_castsi256_pd(nz);
}

inline __m256 keep_mask8(const std::uint8_t* keep) {
  std::uint64_t packed;
  std::memcpy(&packed, keep, 8);
  __m128i bytes = _mm_cvtsi64_si128(static_cast<long long>(packed));
  __m256i lanes = _mm256_cvtepu8_epi32(bytes);
  __m256i nz = _mm256_cmpgt_epi32(lanes, _mm256_setzero_si256());
  return _mm256_castsi256_ps(nz);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  double s = hsum4(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum4(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_squares(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = hsum4(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double* x, std::size_t n, double alpha) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= alpha;
}

void matmul(const double* a, const double* b, double* c, std::size_t n,
            std::size_t k, std::size_t m) {
  std::memset(c, 0, n * m * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = c + i * m;
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const __m256d av = _mm256_set1_pd(arow[p]);
      const double* brow = b + p * m;
      std::size_t j = 0;
      for (; j + 4 <= m; j += 4) {
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(av, _mm256_loadu_pd(brow + j)));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < m; ++j) crow[j] += arow[p] * brow[j];
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
      const __m256d av = _mm256_set1_pd(arow[p]);
      double* crow = c + p * m;
      std::size_t j = 0;
      for (; j + 4 <= m; j += 4) {
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(av, _mm256_loadu_pd(brow + j)));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < m; ++j) crow[j] += arow[p] * brow[j];
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
  const __m256d vs = _mm256_set1_pd(keep_scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d scaled = _mm256_mul_pd(_mm256_loadu_pd(x + i), vs);
    _mm256_storeu_pd(out + i, _mm256_and_pd(scaled, keep_mask4(keep + i)));
  }
  for (; i < n; ++i) out[i] = keep[i] ? x[i] * keep_scale : 0.0;
}

void relu(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d pos = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(v, pos));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* pre, const double* dout, double* dx,
                   std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d pos = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_and_pd(_mm256_loadu_pd(dout + i), pos));
  }
  for (; i < n; ++i) dx[i] = pre[i] > 0.0 ? dout[i] : 0.0;
}

float dotf(const float* a, const float* b, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = _mm256_add_ps(acc, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                           _mm256_loadu_ps(b + i)));
  }
  float s = hsum8(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

float sumf(const float* x, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
  float s = hsum8(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

float sum_squaresf(const float* x, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    acc = _mm256_add_ps(acc, _mm256_mul_ps(v, v));
  }
  float s = hsum8(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void addf(const float* a, const float* b, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i,
                     _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void subf(const float* a, const float* b, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i,
                     _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void hadamardf(const float* a, const float* b, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i,
                     _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpyf(float alpha, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_add_ps(vy, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scalef(float* x, std::size_t n, float alpha) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), va));
  for (; i < n; ++i) x[i] *= alpha;
}

void matmulf(const float* a, const float* b, float* c, std::size_t n,
             std::size_t k, std::size_t m) {
  std::memset(c, 0, n * m * sizeof(float));
  for (std::size_t i = 0; i < n; ++i) {
    float* crow = c + i * m;
    const float* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const __m256 av = _mm256_set1_ps(arow[p]);
      const float* brow = b + p * m;
      std::size_t j = 0;
      for (; j + 8 <= m; j += 8) {
        __m256 vc = _mm256_loadu_ps(crow + j);
        vc = _mm256_add_ps(vc, _mm256_mul_ps(av, _mm256_loadu_ps(brow + j)));
        _mm256_storeu_ps(crow + j, vc);
      }
      for (; j < m; ++j) crow[j] += arow[p] * brow[j];
    }
  }
}

void dropout_applyf(const float* x, const std::uint8_t* keep, float keep_scale,
                    float* out, std::size_t n) {
  const __m256 vs = _mm256_set1_ps(keep_scale);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 scaled = _mm256_mul_ps(_mm256_loadu_ps(x + i), vs);
    _mm256_storeu_ps(out + i, _mm256_and_ps(scaled, keep_mask8(keep + i)));
  }
  for (; i < n; ++i) out[i] = keep[i] ? x[i] * keep_scale : 0.f;
}

void reluf(const float* x, float* out, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    __m256 pos = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(out + i, _mm256_and_ps(v, pos));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.f ? x[i] : 0.f;
}

}  // namespace scd::kernels::avx2_impl

#else  // non-x86 build: table entries forward to the scalar reference

#include "kernels_impl.hpp"

namespace scd::kernels::avx2_impl {
using namespace scd::kernels::scalar_impl;
}

#endif
