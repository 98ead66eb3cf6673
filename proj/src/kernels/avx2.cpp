// AVX2 variants, 4 doubles per lane. Multiply and add are kept as separate
// instructions (no FMA) so element-wise kernels round exactly like the scalar
// reference. Reductions accumulate four partial sums and collapse them in a
// fixed order, so they are deterministic but not bit-equal to scalar.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "dspider/kernels.hpp"

namespace dspider::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);           // {l0+h0, l1+h1}
  const __m128d swap = _mm_unpackhi_pd(pair, pair);  // {l1+h1, l1+h1}
  return _mm_cvtsd_f64(_mm_add_sd(pair, swap));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double nrm2sq_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, va));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scal_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] = alpha * x[i];
}

void wscale_avx2(double w, const double* x, double* out, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vw, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = w * x[i];
}

void half_step_avx2(const double* xc, const double* xp, double eta,
                    const double* d, double* out, std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d veta = _mm256_set1_pd(eta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lead = _mm256_sub_pd(
        _mm256_mul_pd(two, _mm256_loadu_pd(xc + i)), _mm256_loadu_pd(xp + i));
    const __m256d corr = _mm256_mul_pd(veta, _mm256_loadu_pd(d + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(lead, corr));
  }
  for (; i < n; ++i) out[i] = (2.0 * xc[i] - xp[i]) - eta * d[i];
}

void vsub_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void vadd_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

}  // namespace

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

const KernelTable kAvx2Table = {
    "avx2",     dot_avx2,  nrm2sq_avx2,  sq_dist_avx2, axpy_avx2,
    scal_avx2,  wscale_avx2, half_step_avx2, vsub_avx2,  vadd_avx2,
};

}  // namespace dspider::kernels

#endif  // x86-64
