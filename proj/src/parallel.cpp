#include "dspider/parallel.hpp"

#include <cstdlib>

namespace dspider {

namespace {
std::atomic<int> g_thread_cap{0};
}

int max_threads() {
  const int cap = g_thread_cap.load(std::memory_order_relaxed);
  if (cap > 0) return cap;
  if (const char* env = std::getenv("DESPIDER_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_thread_cap(int cap) {
  g_thread_cap.store(cap, std::memory_order_relaxed);
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto pump = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(pump);
  pump();
  for (auto& th : pool) th.join();
}

}  // namespace dspider
