#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

// Finite-sum objectives with per-sample gradient oracles. The global
// objective f is the unweighted mean of the worker objectives f_i, and each
// f_i is the mean over its shard; with equal shards this coincides with the
// mean over all samples.

namespace dspider {

enum class ObjectiveKind { kNonconvexLogistic, kLeastSquares };

ObjectiveKind parse_objective_kind(const std::string& name);
std::string objective_kind_name(ObjectiveKind kind);

class Objective {
 public:
  // Takes ownership of raw data; features row-major m x dim. Labels for the
  // logistic kind must be exactly -1 or +1.
  Objective(ObjectiveKind kind, int dim, std::vector<double> features,
            std::vector<double> labels, double reg_alpha,
            std::uint64_t seed = 0);

  ObjectiveKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int sample_count() const { return m_; }
  double reg_alpha() const { return reg_alpha_; }
  double lipschitz_estimate() const { return lipschitz_; }
  std::uint64_t seed() const { return seed_; }

  const double* feature_row(int idx) const { return &features_[static_cast<std::size_t>(idx) * dim_]; }
  double label(int idx) const { return labels_[idx]; }

  double per_sample_value(const double* x, int idx) const;
  // out = gradient of component idx at x
  void per_sample_grad(const double* x, int idx, double* out) const;
  // acc += gradient of component idx at x (hot path; same arithmetic)
  void per_sample_grad_accum(const double* x, int idx, double* acc) const;

  // mean over all m samples
  double value(const double* x) const;
  void full_grad(const double* x, double* out) const;

  // instrumentation: number of per-sample gradient evaluations so far
  std::uint64_t eval_count() const { return evals_->load(std::memory_order_relaxed); }
  void reset_eval_count() const { evals_->store(0, std::memory_order_relaxed); }

 private:
  void check_index(int idx) const;

  ObjectiveKind kind_;
  int dim_;
  int m_;
  std::vector<double> features_;
  std::vector<double> labels_;
  double reg_alpha_;
  double lipschitz_;
  std::uint64_t seed_;
  std::shared_ptr<std::atomic<std::uint64_t>> evals_;
};

// Synthetic data: features are iid N(0, 1/dim) so sample row norms are O(1)
// and the Lipschitz estimate is step-size friendly. nonconvex-logistic draws
// labels from a planted unit separator and flips each with probability
// label_noise; least-squares sets y = <a, x*> + label_noise * N(0,1).
inline constexpr double kDefaultLabelNoise = 0.1;
Objective make_synthetic(ObjectiveKind kind, int dim, int m,
                         std::uint64_t seed, double reg_alpha,
                         double label_noise = kDefaultLabelNoise);

// Rows `label,feat_0,...,feat_{N-1}`; header line required.
Objective import_csv(const std::string& path, ObjectiveKind kind,
                     double reg_alpha);

struct Shard {
  int worker_id = 0;
  std::vector<int> indices;  // into the parent Objective
  int local_sample_count() const { return static_cast<int>(indices.size()); }
};

enum class PartitionMode { kShuffled, kUnshuffled };

PartitionMode parse_partition_mode(const std::string& name);
std::string partition_mode_name(PartitionMode mode);

// shuffled: seeded permutation cut into contiguous blocks (sizes +-1);
// unshuffled: stable label sort then contiguous blocks (discrete labels only).
std::vector<Shard> partition(const Objective& obj, int n, PartitionMode mode,
                             std::uint64_t seed);

// mean of per-sample gradients over the shard, in shard order
void shard_full_grad(const Objective& obj, const Shard& shard, const double* x,
                     double* out);
double shard_value(const Objective& obj, const Shard& shard, const double* x);

// mean over the batch; checks every index belongs to the shard
std::vector<double> minibatch_grad(const Objective& obj, const Shard& shard,
                                   const double* x,
                                   const std::vector<int>& batch);

// unchecked accumulation core shared with the optimizer hot path
void batch_grad_unchecked(const Objective& obj, const double* x,
                          const std::vector<int>& batch, double* out);

// f and grad f of the ensemble objective (1/n) sum_i f_i
double ensemble_value(const Objective& obj, const std::vector<Shard>& shards,
                      const double* x);
void ensemble_grad(const Objective& obj, const std::vector<Shard>& shards,
                   const double* x, double* out);

struct HeterogeneityReport {
  double zeta0 = 0.0;              // (1/n) sum_i ||grad f_i(0) - grad f(0)||
  double zeta_sup_estimate = 0.0;  // max over probes/workers of that deviation
  double sigma_estimate = 0.0;     // max per-sample gradient std dev
};

// Probes the zero vector plus 8 seeded Gaussian points.
HeterogeneityReport heterogeneity(const Objective& obj,
                                  const std::vector<Shard>& shards);

}  // namespace dspider
