#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dspider/problems.hpp"
#include "dspider/topology.hpp"

// The four optimizer state machines over the full worker ensemble. A step is
// one synchronous round: per-worker compute (parallel, schedule-invariant via
// counter-based batch draws), then the gossip barrier. All four share the
// same kernels and the same half-step arithmetic so that the n=1 decentralized
// runs are bit-identical to the centralized one.

namespace dspider {

enum class Algorithm { kDspider, kDpsgd, kD2, kCspider };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algo);

enum class SampleMode { kWithReplacement, kWithoutReplacement };

SampleMode parse_sample_mode(const std::string& name);
std::string sample_mode_name(SampleMode mode);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::kDspider;
  double eta = 0.05;
  int q = 16;    // restart period (dspider/cspider)
  int s1 = 256;  // restart batch (dspider/cspider)
  int s2 = 16;   // recursion batch; the minibatch size for dpsgd/d2
  SampleMode sample_mode = SampleMode::kWithReplacement;
  std::shared_ptr<const MixingMatrix> topology;
  std::uint64_t seed = 1;
};

struct WorkerState {
  std::vector<double> x_curr;
  std::vector<double> x_prev;
  std::vector<double> g_prev;  // estimator (dspider/cspider), previous
                               // stochastic gradient (d2), last gradient
                               // (dpsgd, diagnostic only)
  const Shard* shard = nullptr;
};

struct EnsembleState {
  std::vector<WorkerState> workers;
  std::uint64_t iter = 0;
  std::uint64_t grad_eval_count = 0;  // per-sample gradient evaluations
  std::uint64_t paper_cost_count = 0; // samples drawn (one per sample/iter)
};

// Workers start at x0 with x_prev = x0 and g_prev = 0; counters zeroed.
EnsembleState init_ensemble(const Objective& obj,
                            const std::vector<Shard>& shards,
                            const AlgoConfig& config,
                            const std::vector<double>& x0);

// Global sample ids for (worker, iter); pure function of the config seed.
// Without replacement the ids are distinct and ascending, so size == shard
// size yields the whole shard in natural order.
std::vector<int> sample_batch(const AlgoConfig& config, const Shard& shard,
                              std::uint64_t iter, int worker, int size);

void dspider_step(EnsembleState& state, const Objective& obj,
                  const AlgoConfig& config);
void dpsgd_step(EnsembleState& state, const Objective& obj,
                const AlgoConfig& config);
void d2_step(EnsembleState& state, const Objective& obj,
             const AlgoConfig& config);
void cspider_step(EnsembleState& state, const Objective& obj,
                  const AlgoConfig& config);

// Dispatch on config.algorithm.
void step(EnsembleState& state, const Objective& obj,
          const AlgoConfig& config);

struct EstimatorView {
  std::vector<std::vector<double>> g;       // g_{k,i} per worker
  std::vector<double> mean_direction;       // (X_k - X_{k+1}) 1 / (n eta)
};

// Diagnostics after at least one step; throws CalledBeforeFirstStep.
EstimatorView estimator_vector(const EnsembleState& state,
                               const AlgoConfig& config);

std::vector<double> mean_iterate(const EnsembleState& state);
bool all_finite(const EnsembleState& state);

// out[i] = sum_j W(j,i) cols[j]; parallel over i, fixed-order accumulation.
void apply_gossip(const MixingMatrix& w,
                  const std::vector<std::vector<double>>& cols,
                  std::vector<std::vector<double>>& out);

}  // namespace dspider
