#include "dspider/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dspider/errors.hpp"
#include "dspider/kernels.hpp"
#include "dspider/parallel.hpp"
#include "dspider/rng.hpp"

namespace dspider {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "dspider") return Algorithm::kDspider;
  if (name == "dpsgd") return Algorithm::kDpsgd;
  if (name == "d2") return Algorithm::kD2;
  if (name == "cspider") return Algorithm::kCspider;
  throw ConfigParseError("unknown algorithm '" + name +
                         "' (expected dspider, dpsgd, d2 or cspider)");
}

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::kDspider: return "dspider";
    case Algorithm::kDpsgd: return "dpsgd";
    case Algorithm::kD2: return "d2";
    case Algorithm::kCspider: return "cspider";
  }
  return "?";
}

SampleMode parse_sample_mode(const std::string& name) {
  if (name == "with-replacement") return SampleMode::kWithReplacement;
  if (name == "without-replacement") return SampleMode::kWithoutReplacement;
  throw ConfigParseError("unknown sample_mode '" + name +
                         "' (expected with-replacement or without-replacement)");
}

std::string sample_mode_name(SampleMode mode) {
  return mode == SampleMode::kWithReplacement ? "with-replacement"
                                              : "without-replacement";
}

EnsembleState init_ensemble(const Objective& obj,
                            const std::vector<Shard>& shards,
                            const AlgoConfig& config,
                            const std::vector<double>& x0) {
  if (!config.topology) throw DimensionMismatch("config.topology is not set");
  const int n = config.topology->n();
  if (static_cast<int>(shards.size()) != n) {
    std::ostringstream msg;
    msg << "topology has " << n << " nodes but " << shards.size()
        << " shards given";
    throw DimensionMismatch(msg.str());
  }
  if (x0.size() != static_cast<std::size_t>(obj.dim()))
    throw DimensionMismatch("x0 dimension does not match objective");
  if (!(config.eta > 0.0)) throw InvalidBatchConfig("eta must be > 0");
  if (config.q < 1 || config.s1 < 1 || config.s2 < 1)
    throw InvalidBatchConfig("q, s1, s2 must be >= 1");
  if (config.sample_mode == SampleMode::kWithoutReplacement) {
    int smallest = obj.sample_count();
    for (const Shard& s : shards)
      smallest = std::min(smallest, s.local_sample_count());
    const bool uses_s1 = config.algorithm == Algorithm::kDspider ||
                         config.algorithm == Algorithm::kCspider;
    const int need = uses_s1 ? std::max(config.s1, config.s2) : config.s2;
    if (need > smallest) {
      std::ostringstream msg;
      msg << "without-replacement batch " << need
          << " exceeds smallest shard size " << smallest;
      throw InvalidBatchConfig(msg.str());
    }
  }
  EnsembleState state;
  state.workers.resize(n);
  for (int i = 0; i < n; ++i) {
    WorkerState& w = state.workers[i];
    w.x_curr = x0;
    w.x_prev = x0;
    w.g_prev.assign(obj.dim(), 0.0);
    w.shard = &shards[i];
  }
  return state;
}

std::vector<int> sample_batch(const AlgoConfig& config, const Shard& shard,
                              std::uint64_t iter, int worker, int size) {
  const int local = shard.local_sample_count();
  if (size < 1) throw EmptyBatch("batch size must be >= 1");
  std::vector<int> batch(size);
  if (config.sample_mode == SampleMode::kWithReplacement) {
    for (int j = 0; j < size; ++j) {
      const auto pos = rng::bounded(
          rng::bits(config.seed, rng::kDomBatch, worker, iter, j), local);
      batch[j] = shard.indices[pos];
    }
    return batch;
  }
  if (size > local)
    throw InvalidBatchConfig("without-replacement batch exceeds shard size");
  // partial Fisher-Yates over shard positions, then ascending sample ids so
  // size == shard size reproduces the shard-local full gradient exactly
  std::vector<int> scratch(shard.indices);
  for (int j = 0; j < size; ++j) {
    const auto r =
        j + static_cast<int>(rng::bounded(
                rng::bits(config.seed, rng::kDomBatch, worker, iter, j),
                local - j));
    std::swap(scratch[j], scratch[r]);
  }
  batch.assign(scratch.begin(), scratch.begin() + size);
  std::sort(batch.begin(), batch.end());
  return batch;
}

void apply_gossip(const MixingMatrix& w,
                  const std::vector<std::vector<double>>& cols,
                  std::vector<std::vector<double>>& out) {
  const int n = w.n();
  const auto dim = cols[0].size();
  out.resize(n);
  parallel_for(n, [&](std::size_t i) {
    out[i].resize(dim);
    bool started = false;
    for (int j = 0; j < n; ++j) {
      const double wji = w.entry(j, static_cast<int>(i));
      if (wji == 0.0) continue;
      if (!started) {
        kernels::wscale(wji, cols[j].data(), out[i].data(), dim);
        started = true;
      } else {
        kernels::axpy(wji, cols[j].data(), out[i].data(), dim);
      }
    }
  });
}

namespace {

void bump_counters(EnsembleState& state, const AlgoConfig& config,
                   bool restart, bool two_point) {
  const auto n = static_cast<std::uint64_t>(state.workers.size());
  if (restart) {
    state.grad_eval_count += n * config.s1;
    state.paper_cost_count += n * config.s1;
  } else {
    state.grad_eval_count += n * config.s2 * (two_point ? 2 : 1);
    state.paper_cost_count += n * config.s2;
  }
}

void rotate(WorkerState& w, std::vector<double>&& x_next,
            std::vector<double>&& g_new) {
  w.x_prev = std::move(w.x_curr);
  w.x_curr = std::move(x_next);
  w.g_prev = std::move(g_new);
}

}  // namespace

void dspider_step(EnsembleState& state, const Objective& obj,
                  const AlgoConfig& config) {
  const auto n = state.workers.size();
  const int dim = obj.dim();
  const bool restart = state.iter % static_cast<std::uint64_t>(config.q) == 0;
  std::vector<std::vector<double>> half(n), g_new(n);

  parallel_for(n, [&](std::size_t i) {
    WorkerState& w = state.workers[i];
    std::vector<double> d(dim);
    g_new[i].resize(dim);
    if (restart) {
      const auto batch = sample_batch(config, *w.shard, state.iter,
                                      static_cast<int>(i), config.s1);
      batch_grad_unchecked(obj, w.x_curr.data(), batch, g_new[i].data());
      kernels::vsub(g_new[i].data(), w.g_prev.data(), d.data(), dim);
    } else {
      const auto batch = sample_batch(config, *w.shard, state.iter,
                                      static_cast<int>(i), config.s2);
      std::vector<double> at_curr(dim), at_prev(dim);
      batch_grad_unchecked(obj, w.x_curr.data(), batch, at_curr.data());
      batch_grad_unchecked(obj, w.x_prev.data(), batch, at_prev.data());
      kernels::vsub(at_curr.data(), at_prev.data(), d.data(), dim);
      kernels::vadd(d.data(), w.g_prev.data(), g_new[i].data(), dim);
    }
    half[i].resize(dim);
    kernels::half_step(w.x_curr.data(), w.x_prev.data(), config.eta, d.data(),
                       half[i].data(), dim);
  });

  std::vector<std::vector<double>> x_next;
  apply_gossip(*config.topology, half, x_next);
  for (std::size_t i = 0; i < n; ++i)
    rotate(state.workers[i], std::move(x_next[i]), std::move(g_new[i]));
  bump_counters(state, config, restart, /*two_point=*/true);
  ++state.iter;
}

void dpsgd_step(EnsembleState& state, const Objective& obj,
                const AlgoConfig& config) {
  const auto n = state.workers.size();
  const int dim = obj.dim();
  std::vector<std::vector<double>> grads(n), cols(n);

  parallel_for(n, [&](std::size_t i) {
    WorkerState& w = state.workers[i];
    const auto batch = sample_batch(config, *w.shard, state.iter,
                                    static_cast<int>(i), config.s2);
    grads[i].resize(dim);
    batch_grad_unchecked(obj, w.x_curr.data(), batch, grads[i].data());
    cols[i] = w.x_curr;
  });

  std::vector<std::vector<double>> mixed;
  apply_gossip(*config.topology, cols, mixed);
  for (std::size_t i = 0; i < n; ++i) {
    kernels::axpy(-config.eta, grads[i].data(), mixed[i].data(), dim);
    rotate(state.workers[i], std::move(mixed[i]), std::move(grads[i]));
  }
  bump_counters(state, config, /*restart=*/false, /*two_point=*/false);
  ++state.iter;
}

void d2_step(EnsembleState& state, const Objective& obj,
             const AlgoConfig& config) {
  const auto n = state.workers.size();
  const int dim = obj.dim();
  // At k = 0, x_prev == x_curr and g_prev == 0 make the bracket collapse to
  // x - eta*g, so the first iteration needs no special case.
  std::vector<std::vector<double>> half(n), grads(n);

  parallel_for(n, [&](std::size_t i) {
    WorkerState& w = state.workers[i];
    const auto batch = sample_batch(config, *w.shard, state.iter,
                                    static_cast<int>(i), config.s2);
    grads[i].resize(dim);
    batch_grad_unchecked(obj, w.x_curr.data(), batch, grads[i].data());
    std::vector<double> d(dim);
    kernels::vsub(grads[i].data(), w.g_prev.data(), d.data(), dim);
    half[i].resize(dim);
    kernels::half_step(w.x_curr.data(), w.x_prev.data(), config.eta, d.data(),
                       half[i].data(), dim);
  });

  std::vector<std::vector<double>> x_next;
  apply_gossip(*config.topology, half, x_next);
  for (std::size_t i = 0; i < n; ++i)
    rotate(state.workers[i], std::move(x_next[i]), std::move(grads[i]));
  bump_counters(state, config, /*restart=*/false, /*two_point=*/false);
  ++state.iter;
}

void cspider_step(EnsembleState& state, const Objective& obj,
                  const AlgoConfig& config) {
  const auto n = state.workers.size();
  const int dim = obj.dim();
  const bool restart = state.iter % static_cast<std::uint64_t>(config.q) == 0;
  const WorkerState& lead = state.workers[0];
  const std::vector<double> xs = lead.x_curr;
  const std::vector<double> xp = lead.x_prev;
  const std::vector<double> v_prev = lead.g_prev;

  std::vector<std::vector<double>> contrib(n);
  parallel_for(n, [&](std::size_t i) {
    const Shard& shard = *state.workers[i].shard;
    contrib[i].resize(dim);
    if (restart) {
      const auto batch = sample_batch(config, shard, state.iter,
                                      static_cast<int>(i), config.s1);
      batch_grad_unchecked(obj, xs.data(), batch, contrib[i].data());
    } else {
      const auto batch = sample_batch(config, shard, state.iter,
                                      static_cast<int>(i), config.s2);
      std::vector<double> at_curr(dim), at_prev(dim);
      batch_grad_unchecked(obj, xs.data(), batch, at_curr.data());
      batch_grad_unchecked(obj, xp.data(), batch, at_prev.data());
      kernels::vsub(at_curr.data(), at_prev.data(), contrib[i].data(), dim);
    }
  });

  std::vector<double> agg = contrib[0];
  for (std::size_t i = 1; i < n; ++i)
    kernels::vadd(agg.data(), contrib[i].data(), agg.data(), dim);
  kernels::scal(1.0 / static_cast<double>(n), agg.data(), dim);

  std::vector<double> d(dim), v(dim);
  if (restart) {
    v = agg;
    kernels::vsub(v.data(), v_prev.data(), d.data(), dim);
  } else {
    d = agg;
    kernels::vadd(d.data(), v_prev.data(), v.data(), dim);
  }
  std::vector<double> x_next(dim);
  kernels::half_step(xs.data(), xp.data(), config.eta, d.data(), x_next.data(),
                     dim);
  for (std::size_t i = 0; i < n; ++i) {
    state.workers[i].x_prev = xs;
    state.workers[i].x_curr = x_next;
    state.workers[i].g_prev = v;
  }
  bump_counters(state, config, restart, /*two_point=*/true);
  ++state.iter;
}

void step(EnsembleState& state, const Objective& obj,
          const AlgoConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kDspider: dspider_step(state, obj, config); return;
    case Algorithm::kDpsgd: dpsgd_step(state, obj, config); return;
    case Algorithm::kD2: d2_step(state, obj, config); return;
    case Algorithm::kCspider: cspider_step(state, obj, config); return;
  }
}

EstimatorView estimator_vector(const EnsembleState& state,
                               const AlgoConfig& config) {
  if (state.iter == 0)
    throw CalledBeforeFirstStep("estimator exists only after the first step");
  const auto n = state.workers.size();
  const auto dim = state.workers[0].x_curr.size();
  EstimatorView view;
  view.g.reserve(n);
  for (const WorkerState& w : state.workers) view.g.push_back(w.g_prev);
  view.mean_direction.assign(dim, 0.0);
  std::vector<double> diff(dim);
  for (const WorkerState& w : state.workers) {
    kernels::vsub(w.x_prev.data(), w.x_curr.data(), diff.data(), dim);
    kernels::vadd(view.mean_direction.data(), diff.data(),
                  view.mean_direction.data(), dim);
  }
  kernels::scal(1.0 / (static_cast<double>(n) * config.eta),
                view.mean_direction.data(), dim);
  return view;
}

std::vector<double> mean_iterate(const EnsembleState& state) {
  const auto n = state.workers.size();
  const auto dim = state.workers[0].x_curr.size();
  std::vector<double> mean(dim, 0.0);
  for (const WorkerState& w : state.workers)
    kernels::vadd(mean.data(), w.x_curr.data(), mean.data(), dim);
  kernels::scal(1.0 / static_cast<double>(n), mean.data(), dim);
  return mean;
}

bool all_finite(const EnsembleState& state) {
  for (const WorkerState& w : state.workers)
    for (double v : w.x_curr)
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace dspider
