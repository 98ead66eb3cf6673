#include <cstdlib>
#include <cstring>

#include "dspider/kernels.hpp"

namespace dspider::kernels {
namespace {

const KernelTable* select() {
  const char* env = std::getenv("DSPIDER_KERNELS");
  if (env != nullptr && std::strcmp(env, "auto") != 0) {
    if (std::strcmp(env, "scalar") == 0) return &kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return &kAvx2Table;
#endif
#if defined(__aarch64__)
    if (std::strcmp(env, "neon") == 0) return &kNeonTable;
#endif
    return &kScalarTable;  // unknown or unsupported name: fall back
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_supported()) return &kAvx2Table;
#endif
#if defined(__aarch64__)
  return &kNeonTable;
#endif
  return &kScalarTable;
}

}  // namespace

const KernelTable& active() {
  static const KernelTable* table = select();
  return *table;
}

std::string active_name() { return active().name; }

}  // namespace dspider::kernels
