// Reference kernels: strict left-to-right accumulation, one operation per
// element. Compiled without auto-vectorization so the summation order is
// exactly what the source says; SIMD variants are tested against these.

#include "dspider/kernels.hpp"

namespace dspider::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double nrm2sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = alpha * x[i];
}

void wscale_scalar(double w, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = w * x[i];
}

void half_step_scalar(const double* xc, const double* xp, double eta,
                      const double* d, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (2.0 * xc[i] - xp[i]) - eta * d[i];
}

void vsub_scalar(const double* a, const double* b, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void vadd_scalar(const double* a, const double* b, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

}  // namespace

const KernelTable kScalarTable = {
    "scalar",     dot_scalar,   nrm2sq_scalar,    sq_dist_scalar,
    axpy_scalar,  scal_scalar,  wscale_scalar,    half_step_scalar,
    vsub_scalar,  vadd_scalar,
};

}  // namespace dspider::kernels
