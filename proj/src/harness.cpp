#include "dspider/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "dspider/errors.hpp"
#include "dspider/kernels.hpp"
#include "dspider/rng.hpp"
#include "dspider/theory.hpp"

namespace dspider {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string hash_id(const std::string& text) {
  std::uint64_t h = rng::kGolden;
  for (unsigned char c : text) h = rng::mix64(h ^ c);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string default_echo(const Objective& obj, const AlgoConfig& config,
                         std::uint64_t k_iters, std::uint64_t eval_stride) {
  std::ostringstream e;
  e << "algorithm=" << algorithm_name(config.algorithm) << "\n"
    << "n=" << config.topology->n() << "\n"
    << "objective=" << objective_kind_name(obj.kind()) << "\n"
    << "dim=" << obj.dim() << "\n"
    << "m=" << obj.sample_count() << "\n"
    << "reg_alpha=" << format_double(obj.reg_alpha()) << "\n"
    << "eta=" << format_double(config.eta) << "\n"
    << "q=" << config.q << "\n"
    << "s1=" << config.s1 << "\n"
    << "s2=" << config.s2 << "\n"
    << "sample_mode=" << sample_mode_name(config.sample_mode) << "\n"
    << "K=" << k_iters << "\n"
    << "seed=" << config.seed << "\n"
    << "eval_stride=" << eval_stride << "\n";
  return e.str();
}

MetricRow measure(const EnsembleState& state, const Objective& obj,
                  const std::vector<Shard>& shards, double wall_ms) {
  const int dim = obj.dim();
  MetricRow row;
  row.iter = state.iter;
  const std::vector<double> mean = mean_iterate(state);
  std::vector<double> grad(dim);
  ensemble_grad(obj, shards, mean.data(), grad.data());
  row.grad_norm_mean = std::sqrt(kernels::nrm2sq(grad.data(), dim));
  double consensus = 0.0;
  for (const WorkerState& w : state.workers)
    consensus += kernels::sq_dist(w.x_curr.data(), mean.data(), dim);
  row.consensus_err = consensus;
  row.loss_mean = ensemble_value(obj, shards, mean.data());
  row.cum_raw_evals = state.grad_eval_count;
  row.cum_paper_cost = state.paper_cost_count;
  row.wall_ms = wall_ms;
  return row;
}

}  // namespace

RunRecord run(const Objective& obj, const std::vector<Shard>& shards,
              const AlgoConfig& config, const std::vector<double>& x0,
              std::uint64_t k_iters, std::uint64_t eval_stride) {
  if (k_iters < 1) throw InvalidBatchConfig("K must be >= 1");
  if (eval_stride < 1) throw InvalidBatchConfig("eval_stride must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  EnsembleState state = init_ensemble(obj, shards, config, x0);
  RunRecord record;
  record.algorithm = algorithm_name(config.algorithm);
  record.seed = config.seed;
  record.config_echo = default_echo(obj, config, k_iters, eval_stride);
  record.run_id = hash_id(record.config_echo);

  record.rows.push_back(measure(state, obj, shards, elapsed_ms()));
  for (std::uint64_t k = 0; k < k_iters; ++k) {
    step(state, obj, config);
    if (!all_finite(state)) {
      record.diverged = true;
      record.diverged_iter = state.iter;
      break;
    }
    if (state.iter % eval_stride == 0 || state.iter == k_iters)
      record.rows.push_back(measure(state, obj, shards, elapsed_ms()));
  }
  record.final_mean = mean_iterate(state);
  return record;
}

void set_config_echo(RunRecord& record, const std::string& echo) {
  record.config_echo = echo;
  record.run_id = hash_id(echo);
}

double mean_grad_norm(const RunRecord& record, std::uint64_t from_iter,
                      std::uint64_t to_iter) {
  double acc = 0.0;
  std::uint64_t count = 0;
  for (const MetricRow& row : record.rows) {
    if (row.iter < from_iter || row.iter > to_iter) continue;
    acc += row.grad_norm_mean * row.grad_norm_mean;
    ++count;
  }
  if (count == 0) {
    std::ostringstream msg;
    msg << "no recorded iterations in [" << from_iter << ", " << to_iter
        << "]";
    throw EmptyWindow(msg.str());
  }
  return acc / static_cast<double>(count);
}

std::optional<CostAtThreshold> cost_to_threshold(const RunRecord& record,
                                                 double threshold) {
  for (const MetricRow& row : record.rows) {
    if (row.grad_norm_mean <= threshold)
      return CostAtThreshold{row.iter, row.cum_raw_evals, row.cum_paper_cost};
  }
  return std::nullopt;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "eta") return SweepAxis::kEta;
  if (name == "epsilon") return SweepAxis::kEpsilon;
  if (name == "topology") return SweepAxis::kTopology;
  if (name == "mode") return SweepAxis::kMode;
  if (name == "algorithm") return SweepAxis::kAlgorithm;
  throw ConfigParseError(
      "unknown sweep axis '" + name +
      "' (expected eta, epsilon, topology, mode or algorithm)");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kEta: return "eta";
    case SweepAxis::kEpsilon: return "epsilon";
    case SweepAxis::kTopology: return "topology";
    case SweepAxis::kMode: return "mode";
    case SweepAxis::kAlgorithm: return "algorithm";
  }
  return "?";
}

namespace {

double parse_value(const std::string& text, const char* what) {
  std::istringstream ss(text);
  double v;
  if (!(ss >> v) || !(ss >> std::ws).eof())
    throw ConfigParseError(std::string("cannot parse ") + what + " value '" +
                           text + "'");
  return v;
}

std::shared_ptr<const MixingMatrix> topology_by_name(const std::string& name,
                                                     int n) {
  if (name == "ring")
    return std::make_shared<MixingMatrix>(build_ring(n));
  if (name == "complete")
    return std::make_shared<MixingMatrix>(build_complete(n));
  if (name.rfind("file:", 0) == 0) {
    auto m = std::make_shared<MixingMatrix>(load_matrix(name.substr(5)));
    if (m->n() != n) {
      std::ostringstream msg;
      msg << "topology file has " << m->n() << " nodes, expected " << n;
      throw DimensionMismatch(msg.str());
    }
    return m;
  }
  throw ConfigParseError("unknown topology '" + name +
                         "' (expected ring, complete or file:<path>)");
}

}  // namespace

std::vector<RunRecord> sweep(const Objective& obj,
                             const std::vector<Shard>& base_shards,
                             const AlgoConfig& base,
                             const std::vector<double>& x0,
                             std::uint64_t k_iters, std::uint64_t eval_stride,
                             SweepAxis axis,
                             const std::vector<std::string>& values,
                             std::optional<double> sigma) {
  if (values.empty()) throw ConfigParseError("sweep needs at least one value");
  std::vector<RunRecord> records;
  records.reserve(values.size());

  double sigma_est = 0.0;
  if (axis == SweepAxis::kEpsilon) {
    sigma_est = sigma ? *sigma
                      : heterogeneity(obj, base_shards).sigma_estimate;
    if (!(sigma_est > 0.0))
      throw ConfigParseError("epsilon sweep needs a positive sigma");
  }

  for (const std::string& value : values) {
    AlgoConfig cfg = base;
    std::vector<Shard> shards = base_shards;
    switch (axis) {
      case SweepAxis::kEta:
        cfg.eta = parse_value(value, "eta");
        break;
      case SweepAxis::kEpsilon: {
        const double eps = parse_value(value, "epsilon");
        if (eps <= 0.0) throw ConfigParseError("epsilon must be > 0");
        const double lip = obj.lipschitz_estimate();
        double c2 = 0.0;
        const MixingMatrix& w = *cfg.topology;
        if (w.n() > 1)
          c2 = constants(w.lambda2(), w.lambda_n(), lip, base.eta, base.q,
                         base.s2)
                   .c2;
        cfg.s1 = static_cast<int>(
            std::ceil(sigma_est * sigma_est / (eps * eps)));
        cfg.s2 = static_cast<int>(std::ceil(sigma_est / eps));
        cfg.s1 = std::max(cfg.s1, 1);
        cfg.s2 = std::max(cfg.s2, 1);
        cfg.q = cfg.s2;
        cfg.eta = 0.9 * eta_max(lip, c2);
        break;
      }
      case SweepAxis::kTopology:
        cfg.topology = topology_by_name(value, base.topology->n());
        break;
      case SweepAxis::kMode:
        shards = partition(obj, base.topology->n(),
                           parse_partition_mode(value), cfg.seed);
        break;
      case SweepAxis::kAlgorithm:
        cfg.algorithm = parse_algorithm(value);
        break;
    }
    RunRecord record = run(obj, shards, cfg, x0, k_iters, eval_stride);
    record.tag = sweep_axis_name(axis) + "=" + value;
    records.push_back(std::move(record));
  }
  return records;
}

void write_csv(const RunRecord& record, std::ostream& out) {
  out << "iter,grad_norm_mean,consensus_err,loss_mean,cum_raw_evals,"
         "cum_paper_cost,wall_ms\n";
  for (const MetricRow& row : record.rows) {
    out << row.iter << ',' << format_double(row.grad_norm_mean) << ','
        << format_double(row.consensus_err) << ','
        << format_double(row.loss_mean) << ',' << row.cum_raw_evals << ','
        << row.cum_paper_cost << ',' << format_double(row.wall_ms) << '\n';
  }
}

void write_sidecar(const RunRecord& record, std::ostream& out) {
  out << "# run_id = " << record.run_id << "\n";
  out << "# algorithm = " << record.algorithm << "\n";
  if (!record.tag.empty()) out << "# tag = " << record.tag << "\n";
  if (record.diverged)
    out << "# diverged_at_iter = " << record.diverged_iter << "\n";
  out << record.config_echo;
}

}  // namespace dspider
