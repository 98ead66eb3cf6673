// NEON variants, 2 doubles per lane. Same discipline as the AVX2 file:
// separate multiply and add (vmulq/vaddq, no vfmaq) so element-wise kernels
// match the scalar reference bit for bit; reductions use fixed-order partial
// sums.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "dspider/kernels.hpp"

namespace dspider::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double nrm2sq_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(a + i);
    acc = vaddq_f64(acc, vmulq_f64(v, v));
  }
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

double sq_dist_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vaddq_f64(acc, vmulq_f64(d, d));
  }
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scal_neon(double alpha, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] = alpha * x[i];
}

void wscale_neon(double w, const double* x, double* out, std::size_t n) {
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmulq_f64(vw, vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = w * x[i];
}

void half_step_neon(const double* xc, const double* xp, double eta,
                    const double* d, double* out, std::size_t n) {
  const float64x2_t two = vdupq_n_f64(2.0);
  const float64x2_t veta = vdupq_n_f64(eta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t lead =
        vsubq_f64(vmulq_f64(two, vld1q_f64(xc + i)), vld1q_f64(xp + i));
    const float64x2_t corr = vmulq_f64(veta, vld1q_f64(d + i));
    vst1q_f64(out + i, vsubq_f64(lead, corr));
  }
  for (; i < n; ++i) out[i] = (2.0 * xc[i] - xp[i]) - eta * d[i];
}

void vsub_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void vadd_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

}  // namespace

const KernelTable kNeonTable = {
    "neon",     dot_neon,  nrm2sq_neon,  sq_dist_neon, axpy_neon,
    scal_neon,  wscale_neon, half_step_neon, vsub_neon,  vadd_neon,
};

}  // namespace dspider::kernels

#endif  // aarch64
