#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

// Deterministic intra-iteration parallelism. Work items are indexed and
// independent; each item writes only its own output slot, so results are
// identical for any thread count or schedule. Reductions must be merged by
// the caller in item order after the join.

namespace dspider {

// Thread budget: DESPIDER_THREADS if set (min 1), else hardware concurrency.
// set_thread_cap(0) restores env/hardware behaviour; tests use nonzero caps.
int max_threads();
void set_thread_cap(int cap);

// Runs fn(i) for i in [0, count). Spawns at most max_threads() workers that
// pull items from a shared counter; with one thread it is a plain loop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace dspider
