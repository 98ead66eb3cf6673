#include "dspider/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dspider/errors.hpp"
#include "dspider/kernels.hpp"
#include "dspider/parallel.hpp"
#include "dspider/rng.hpp"

namespace dspider {

ObjectiveKind parse_objective_kind(const std::string& name) {
  if (name == "nonconvex-logistic") return ObjectiveKind::kNonconvexLogistic;
  if (name == "least-squares") return ObjectiveKind::kLeastSquares;
  throw ConfigParseError("unknown objective kind '" + name +
                         "' (expected nonconvex-logistic or least-squares)");
}

std::string objective_kind_name(ObjectiveKind kind) {
  return kind == ObjectiveKind::kNonconvexLogistic ? "nonconvex-logistic"
                                                   : "least-squares";
}

PartitionMode parse_partition_mode(const std::string& name) {
  if (name == "shuffled") return PartitionMode::kShuffled;
  if (name == "unshuffled") return PartitionMode::kUnshuffled;
  throw ConfigParseError("unknown partition mode '" + name +
                         "' (expected shuffled or unshuffled)");
}

std::string partition_mode_name(PartitionMode mode) {
  return mode == PartitionMode::kShuffled ? "shuffled" : "unshuffled";
}

namespace {

// 1/(1+e^m) without overflow
double sigmoid_neg(double m) {
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

// log(1+e^-m) without overflow
double softplus_neg(double m) {
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

double estimate_lipschitz(ObjectiveKind kind, const std::vector<double>& feat,
                          int m, int dim, double reg_alpha) {
  double max_sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double sq =
        kernels::nrm2sq(&feat[static_cast<std::size_t>(i) * dim], dim);
    max_sq = std::max(max_sq, sq);
  }
  if (kind == ObjectiveKind::kNonconvexLogistic)
    return 0.25 * max_sq + 2.0 * reg_alpha;
  return max_sq;  // per-sample Hessian a a^T has spectral norm ||a||^2
}

}  // namespace

Objective::Objective(ObjectiveKind kind, int dim, std::vector<double> features,
                     std::vector<double> labels, double reg_alpha,
                     std::uint64_t seed)
    : kind_(kind),
      dim_(dim),
      m_(static_cast<int>(labels.size())),
      features_(std::move(features)),
      labels_(std::move(labels)),
      reg_alpha_(reg_alpha),
      seed_(seed),
      evals_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (dim_ < 1 || m_ < 1) throw InvalidDimension("need dim >= 1 and m >= 1");
  if (features_.size() != static_cast<std::size_t>(m_) * dim_)
    throw DimensionMismatch("feature matrix is not m x dim");
  if (reg_alpha_ < 0.0) throw InvalidDimension("reg_alpha must be >= 0");
  if (kind_ == ObjectiveKind::kNonconvexLogistic) {
    for (double y : labels_)
      if (y != 1.0 && y != -1.0)
        throw DiscreteLabelsRequired(
            "nonconvex-logistic labels must be exactly -1 or +1");
  }
  lipschitz_ = estimate_lipschitz(kind_, features_, m_, dim_, reg_alpha_);
}

void Objective::check_index(int idx) const {
  if (idx < 0 || idx >= m_) {
    std::ostringstream msg;
    msg << "sample index " << idx << " outside [0, " << m_ << ")";
    throw IndexOutOfRange(msg.str());
  }
}

double Objective::per_sample_value(const double* x, int idx) const {
  check_index(idx);
  const double* a = feature_row(idx);
  const double z = kernels::dot(a, x, dim_);
  if (kind_ == ObjectiveKind::kLeastSquares) {
    const double r = z - labels_[idx];
    return 0.5 * r * r;
  }
  double reg = 0.0;
  for (int j = 0; j < dim_; ++j) {
    const double sq = x[j] * x[j];
    reg += sq / (1.0 + sq);
  }
  return softplus_neg(labels_[idx] * z) + reg_alpha_ * reg;
}

void Objective::per_sample_grad_accum(const double* x, int idx,
                                      double* acc) const {
  evals_->fetch_add(1, std::memory_order_relaxed);
  const double* a = feature_row(idx);
  const double z = kernels::dot(a, x, dim_);
  if (kind_ == ObjectiveKind::kLeastSquares) {
    kernels::axpy(z - labels_[idx], a, acc, dim_);
    return;
  }
  const double y = labels_[idx];
  kernels::axpy(-y * sigmoid_neg(y * z), a, acc, dim_);
  if (reg_alpha_ != 0.0) {
    for (int j = 0; j < dim_; ++j) {
      const double u = 1.0 + x[j] * x[j];
      acc[j] += reg_alpha_ * (2.0 * x[j] / (u * u));
    }
  }
}

void Objective::per_sample_grad(const double* x, int idx, double* out) const {
  check_index(idx);
  std::fill(out, out + dim_, 0.0);
  per_sample_grad_accum(x, idx, out);
}

double Objective::value(const double* x) const {
  double acc = 0.0;
  for (int i = 0; i < m_; ++i) acc += per_sample_value(x, i);
  return acc / m_;
}

void Objective::full_grad(const double* x, double* out) const {
  std::fill(out, out + dim_, 0.0);
  for (int i = 0; i < m_; ++i) per_sample_grad_accum(x, i, out);
  kernels::scal(1.0 / m_, out, dim_);
}

Objective make_synthetic(ObjectiveKind kind, int dim, int m,
                         std::uint64_t seed, double reg_alpha,
                         double label_noise) {
  if (dim < 1 || m < 1) throw InvalidDimension("need dim >= 1 and m >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<double> feat(static_cast<std::size_t>(m) * dim);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < dim; ++j)
      feat[static_cast<std::size_t>(i) * dim + j] =
          scale * rng::normal(seed, rng::kDomFeature, i, 0, j);

  std::vector<double> planted(dim);
  for (int j = 0; j < dim; ++j)
    planted[j] = rng::normal(seed, rng::kDomPlanted, 0, 0, j);

  std::vector<double> labels(m);
  if (kind == ObjectiveKind::kNonconvexLogistic) {
    const double norm = std::sqrt(kernels::nrm2sq(planted.data(), dim));
    if (norm > 0.0) kernels::scal(1.0 / norm, planted.data(), dim);
    for (int i = 0; i < m; ++i) {
      const double margin =
          kernels::dot(&feat[static_cast<std::size_t>(i) * dim],
                       planted.data(), dim);
      double y = margin >= 0.0 ? 1.0 : -1.0;
      if (rng::uniform01(seed, rng::kDomLabelNoise, i, 0, 0) < label_noise)
        y = -y;
      labels[i] = y;
    }
  } else {
    for (int i = 0; i < m; ++i) {
      double y = kernels::dot(&feat[static_cast<std::size_t>(i) * dim],
                              planted.data(), dim);
      if (label_noise != 0.0)
        y += label_noise * rng::normal(seed, rng::kDomLabelNoise, i, 0, 0);
      labels[i] = y;
    }
  }
  return Objective(kind, dim, std::move(feat), std::move(labels), reg_alpha,
                   seed);
}

Objective import_csv(const std::string& path, ObjectiveKind kind,
                     double reg_alpha) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigParseError("data file " + path + " is empty");
  {
    // header required: the first field must not parse as a number
    std::istringstream probe(line.substr(0, line.find(',')));
    double v;
    if (probe >> v)
      throw ConfigParseError("data file " + path +
                             " must start with a header line");
  }
  std::vector<double> feat;
  std::vector<double> labels;
  int dim = -1;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::istringstream cs(cell);
      double v;
      if (!(cs >> v)) {
        std::ostringstream msg;
        msg << "data file " << path << " line " << lineno
            << ": cannot parse '" << cell << "'";
        throw ConfigParseError(msg.str());
      }
      row.push_back(v);
    }
    if (row.size() < 2) {
      std::ostringstream msg;
      msg << "data file " << path << " line " << lineno
          << ": need label plus at least one feature";
      throw ConfigParseError(msg.str());
    }
    if (dim < 0) dim = static_cast<int>(row.size()) - 1;
    if (static_cast<int>(row.size()) - 1 != dim) {
      std::ostringstream msg;
      msg << "data file " << path << " line " << lineno << ": expected "
          << dim << " features, got " << row.size() - 1;
      throw ConfigParseError(msg.str());
    }
    labels.push_back(row[0]);
    feat.insert(feat.end(), row.begin() + 1, row.end());
  }
  if (labels.empty())
    throw ConfigParseError("data file " + path + " has no data rows");
  return Objective(kind, dim, std::move(feat), std::move(labels), reg_alpha);
}

std::vector<Shard> partition(const Objective& obj, int n, PartitionMode mode,
                             std::uint64_t seed) {
  const int m = obj.sample_count();
  if (n < 1) throw InvalidDimension("worker count must be >= 1");
  if (n > m) {
    std::ostringstream msg;
    msg << "cannot split " << m << " samples across " << n << " workers";
    throw TooManyWorkers(msg.str());
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  if (mode == PartitionMode::kShuffled) {
    for (int i = m - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng::bounded(
          rng::bits(seed, rng::kDomPartition, 0, 0, i), i + 1));
      std::swap(order[i], order[j]);
    }
  } else {
    if (obj.kind() != ObjectiveKind::kNonconvexLogistic)
      throw DiscreteLabelsRequired(
          "unshuffled partition needs discrete labels; " +
          objective_kind_name(obj.kind()) + " labels are continuous");
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return obj.label(a) < obj.label(b);
    });
  }
  std::vector<Shard> shards(n);
  const int base = m / n;
  const int rem = m % n;
  int pos = 0;
  for (int w = 0; w < n; ++w) {
    const int len = base + (w < rem ? 1 : 0);
    shards[w].worker_id = w;
    shards[w].indices.assign(order.begin() + pos, order.begin() + pos + len);
    pos += len;
  }
  return shards;
}

void batch_grad_unchecked(const Objective& obj, const double* x,
                          const std::vector<int>& batch, double* out) {
  const int dim = obj.dim();
  std::fill(out, out + dim, 0.0);
  for (int idx : batch) obj.per_sample_grad_accum(x, idx, out);
  kernels::scal(1.0 / static_cast<double>(batch.size()), out, dim);
}

void shard_full_grad(const Objective& obj, const Shard& shard, const double* x,
                     double* out) {
  batch_grad_unchecked(obj, x, shard.indices, out);
}

double shard_value(const Objective& obj, const Shard& shard, const double* x) {
  double acc = 0.0;
  for (int idx : shard.indices) acc += obj.per_sample_value(x, idx);
  return acc / shard.indices.size();
}

std::vector<double> minibatch_grad(const Objective& obj, const Shard& shard,
                                   const double* x,
                                   const std::vector<int>& batch) {
  if (batch.empty()) throw EmptyBatch("minibatch must be nonempty");
  std::vector<int> sorted = shard.indices;
  std::sort(sorted.begin(), sorted.end());
  for (int idx : batch) {
    if (idx < 0 || idx >= obj.sample_count() ||
        !std::binary_search(sorted.begin(), sorted.end(), idx)) {
      std::ostringstream msg;
      msg << "batch index " << idx << " not in shard " << shard.worker_id;
      throw IndexOutOfRange(msg.str());
    }
  }
  std::vector<double> out(obj.dim());
  batch_grad_unchecked(obj, x, batch, out.data());
  return out;
}

double ensemble_value(const Objective& obj, const std::vector<Shard>& shards,
                      const double* x) {
  double acc = 0.0;
  for (const Shard& s : shards) acc += shard_value(obj, s, x);
  return acc / shards.size();
}

void ensemble_grad(const Objective& obj, const std::vector<Shard>& shards,
                   const double* x, double* out) {
  const int dim = obj.dim();
  const auto n = shards.size();
  std::vector<double> scratch(n * dim);
  // per-worker shard gradients are independent; merge in worker order
  parallel_for(n, [&](std::size_t w) {
    shard_full_grad(obj, shards[w], x, &scratch[w * dim]);
  });
  std::fill(out, out + dim, 0.0);
  for (std::size_t w = 0; w < n; ++w)
    kernels::vadd(out, &scratch[w * dim], out, dim);
  kernels::scal(1.0 / static_cast<double>(n), out, dim);
}

HeterogeneityReport heterogeneity(const Objective& obj,
                                  const std::vector<Shard>& shards) {
  const int dim = obj.dim();
  const auto n = shards.size();
  constexpr int kProbes = 8;

  std::vector<std::vector<double>> points(1 + kProbes,
                                          std::vector<double>(dim, 0.0));
  for (int p = 0; p < kProbes; ++p)
    for (int j = 0; j < dim; ++j)
      points[1 + p][j] = rng::normal(obj.seed(), rng::kDomProbe, p, 0, j);

  HeterogeneityReport rep;
  std::vector<double> gbar(dim), sample(dim);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double* x = points[p].data();
    std::vector<std::vector<double>> grads(n, std::vector<double>(dim));
    for (std::size_t w = 0; w < n; ++w)
      shard_full_grad(obj, shards[w], x, grads[w].data());
    std::fill(gbar.begin(), gbar.end(), 0.0);
    for (std::size_t w = 0; w < n; ++w)
      kernels::vadd(gbar.data(), grads[w].data(), gbar.data(), dim);
    kernels::scal(1.0 / static_cast<double>(n), gbar.data(), dim);

    double dev_sum = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
      const double dev =
          std::sqrt(kernels::sq_dist(grads[w].data(), gbar.data(), dim));
      dev_sum += dev;
      rep.zeta_sup_estimate = std::max(rep.zeta_sup_estimate, dev);

      double var = 0.0;
      for (int idx : shards[w].indices) {
        obj.per_sample_grad(x, idx, sample.data());
        var += kernels::sq_dist(sample.data(), grads[w].data(), dim);
      }
      var /= shards[w].indices.size();
      rep.sigma_estimate = std::max(rep.sigma_estimate, std::sqrt(var));
    }
    if (p == 0) rep.zeta0 = dev_sum / static_cast<double>(n);
  }
  return rep;
}

}  // namespace dspider
