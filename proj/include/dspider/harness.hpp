#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dspider/algorithms.hpp"

// Experiment driver: runs K synchronous iterations, records exact
// full-gradient diagnostics at the mean iterate every eval_stride iterations
// (never charged to the cost counters), and persists CSV plus a sidecar echo
// of the resolved configuration. Apart from wall_ms every recorded field is a
// deterministic function of (config, seed).

namespace dspider {

struct MetricRow {
  std::uint64_t iter = 0;
  double grad_norm_mean = 0.0;  // ||grad f(mean iterate)||
  double consensus_err = 0.0;   // sum_i ||x_i - mean||^2
  double loss_mean = 0.0;       // f(mean iterate)
  std::uint64_t cum_raw_evals = 0;
  std::uint64_t cum_paper_cost = 0;
  double wall_ms = 0.0;
};

struct RunRecord {
  std::vector<MetricRow> rows;  // iteration 0, every stride, and iteration K
  std::vector<double> final_mean;
  bool diverged = false;
  std::uint64_t diverged_iter = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string tag;  // sweep axis label, empty otherwise
  std::string config_echo;
  std::string run_id;
};

// Executes K steps; aborts early (diverged flag, partial rows) if any iterate
// coordinate becomes NaN/inf.
RunRecord run(const Objective& obj, const std::vector<Shard>& shards,
              const AlgoConfig& config, const std::vector<double>& x0,
              std::uint64_t k_iters, std::uint64_t eval_stride);

// Replaces the record's config echo (e.g. with the resolved CLI config) and
// recomputes the run id hash.
void set_config_echo(RunRecord& record, const std::string& echo);

// Average of squared grad_norm_mean over recorded rows with
// from_iter <= iter <= to_iter; throws EmptyWindow if none fall inside.
double mean_grad_norm(const RunRecord& record, std::uint64_t from_iter,
                      std::uint64_t to_iter);

struct CostAtThreshold {
  std::uint64_t iter = 0;
  std::uint64_t raw_evals = 0;
  std::uint64_t paper_cost = 0;
};

// First recorded row with grad_norm_mean <= threshold; nullopt = not reached.
std::optional<CostAtThreshold> cost_to_threshold(const RunRecord& record,
                                                 double threshold);

enum class SweepAxis { kEta, kEpsilon, kTopology, kMode, kAlgorithm };

SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

// One run per value under the shared master seed. The epsilon axis installs
// the ceil(sigma^2/eps^2), ceil(sigma/eps) schedule with eta = 0.9*eta_max;
// sigma defaults to the heterogeneity estimate of the base shards. The mode
// axis repartitions; the topology axis rebuilds W with the same worker count.
std::vector<RunRecord> sweep(const Objective& obj,
                             const std::vector<Shard>& base_shards,
                             const AlgoConfig& base,
                             const std::vector<double>& x0,
                             std::uint64_t k_iters, std::uint64_t eval_stride,
                             SweepAxis axis,
                             const std::vector<std::string>& values,
                             std::optional<double> sigma = std::nullopt);

// Header `iter,grad_norm_mean,consensus_err,loss_mean,cum_raw_evals,
// cum_paper_cost,wall_ms`; floats at 17 significant digits.
void write_csv(const RunRecord& record, std::ostream& out);
// Run id comment followed by the config echo (itself a valid config file).
void write_sidecar(const RunRecord& record, std::ostream& out);

std::string format_double(double v);  // %.17g

}  // namespace dspider
