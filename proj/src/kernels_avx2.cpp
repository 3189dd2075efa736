#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace ssimopt::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i];
  return r;
}

double sumsq_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * a[i];
  return r;
}

double diff_sumsq_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void lincomb_avx2(double a, const double* x, double b, const double* y,
                  double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(
        va, _mm256_loadu_pd(x + i),
        _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void soft_threshold_avx2(const double* v, double tau, double* out,
                         std::size_t n) {
  const __m256d vtau = _mm256_set1_pd(tau);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_loadu_pd(v + i);
    const __m256d abs_t = _mm256_andnot_pd(sign_mask, t);
    const __m256d shrunk = _mm256_max_pd(_mm256_sub_pd(abs_t, vtau), zero);
    const __m256d sign = _mm256_and_pd(sign_mask, t);
    _mm256_storeu_pd(out + i, _mm256_or_pd(shrunk, sign));
  }
  for (; i < n; ++i) {
    const double t = v[i];
    if (t > tau)
      out[i] = t - tau;
    else if (t < -tau)
      out[i] = t + tau;
    else
      out[i] = 0.0;
  }
}

double hypot_sum_avx2(const double* gx, const double* gy, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(gx + i);
    const __m256d y = _mm256_loadu_pd(gy + i);
    const __m256d m = _mm256_fmadd_pd(x, x, _mm256_mul_pd(y, y));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(m));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
  return r;
}

}  // namespace

const Table& avx2_table() {
  static const Table t{dot_avx2,     sum_avx2,
                       sumsq_avx2,   diff_sumsq_avx2,
                       axpy_avx2,    scale_avx2,
                       lincomb_avx2, soft_threshold_avx2,
                       hypot_sum_avx2};
  return t;
}

}  // namespace ssimopt::kernels::detail
