#pragma once

#include <cstddef>
#include <string>

// Dense vector kernels in two layers: scalar reference implementations and
// SIMD variants (AVX2 on x86-64, NEON on aarch64) selected once per process.
// Element-wise kernels are bit-identical across variants (no FMA, matching
// per-element expressions, -ffp-contract=off). Reduction kernels may differ
// in summation order; the dispatch is fixed for the lifetime of the process
// so results stay reproducible on a given machine.
//
// DSPIDER_KERNELS=scalar|avx2|neon|auto overrides the automatic choice.

namespace dspider::kernels {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*nrm2sq)(const double* a, std::size_t n);
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scal)(double alpha, double* x, std::size_t n);
  // out = w * x
  void (*wscale)(double w, const double* x, double* out, std::size_t n);
  // out = (2*xc - xp) - eta*d
  void (*half_step)(const double* xc, const double* xp, double eta,
                    const double* d, double* out, std::size_t n);
  void (*vsub)(const double* a, const double* b, double* out, std::size_t n);
  void (*vadd)(const double* a, const double* b, double* out, std::size_t n);
};

extern const KernelTable kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Table;
bool avx2_supported();
#endif
#if defined(__aarch64__)
extern const KernelTable kNeonTable;
#endif

const KernelTable& active();
std::string active_name();

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double nrm2sq(const double* a, std::size_t n) {
  return active().nrm2sq(a, n);
}
inline double sq_dist(const double* a, const double* b, std::size_t n) {
  return active().sq_dist(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void scal(double alpha, double* x, std::size_t n) {
  active().scal(alpha, x, n);
}
inline void wscale(double w, const double* x, double* out, std::size_t n) {
  active().wscale(w, x, out, n);
}
inline void half_step(const double* xc, const double* xp, double eta,
                      const double* d, double* out, std::size_t n) {
  active().half_step(xc, xp, eta, d, out, n);
}
inline void vsub(const double* a, const double* b, double* out, std::size_t n) {
  active().vsub(a, b, out, n);
}
inline void vadd(const double* a, const double* b, double* out, std::size_t n) {
  active().vadd(a, b, out, n);
}

}  // namespace dspider::kernels
