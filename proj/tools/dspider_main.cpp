// Command-line front end: run / compare / sweep / validate-topology / theory.
// Exit codes: 0 success, 1 invalid input or I/O failure, 2 diverged run.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dspider/errors.hpp"
#include "dspider/harness.hpp"
#include "dspider/run_config.hpp"
#include "dspider/theory.hpp"
#include "dspider/topology.hpp"

namespace fs = std::filesystem;
using namespace dspider;

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char ch : s)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' ||
            ch == '-' || ch == '_')
               ? ch
               : '-';
  return out;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// CSV plus config sidecar under a deterministic name; refuses to clobber.
fs::path write_outputs(const RunRecord& rec, const std::string& out_dir,
                       const std::string& base, bool force) {
  fs::create_directories(out_dir);
  const fs::path csv = fs::path(out_dir) / (base + ".csv");
  const fs::path cfg = fs::path(out_dir) / (base + ".cfg");
  if (!force && (fs::exists(csv) || fs::exists(cfg)))
    throw IoError(csv.string() + " already exists (pass --force to replace)");
  std::ofstream c(csv);
  if (!c) throw IoError("cannot write " + csv.string());
  write_csv(rec, c);
  std::ofstream s(cfg);
  if (!s) throw IoError("cannot write " + cfg.string());
  write_sidecar(rec, s);
  return csv;
}

void print_run_summary(const RunRecord& rec, const fs::path& csv) {
  const MetricRow& last = rec.rows.back();
  std::cout << "csv = " << csv.string() << "\n";
  std::cout << "run_id = " << rec.run_id << "\n";
  std::cout << "rows = " << rec.rows.size() << "\n";
  std::cout << "final_grad_norm = " << format_double(last.grad_norm_mean)
            << "\n";
  std::cout << "final_consensus_err = " << format_double(last.consensus_err)
            << "\n";
  std::cout << "raw_evals = " << last.cum_raw_evals << "\n";
  std::cout << "paper_cost = " << last.cum_paper_cost << "\n";
  if (rec.diverged)
    std::cout << "diverged_at_iter = " << rec.diverged_iter << "\n";
}

RunRecord run_one(const RunConfig& rc) {
  BuiltExperiment built = build_experiment(rc);
  const std::vector<double> x0(built.obj.dim(), 0.0);
  RunRecord rec =
      run(built.obj, built.shards, built.algo, x0,
          static_cast<std::uint64_t>(rc.k_iters),
          static_cast<std::uint64_t>(rc.eval_stride));
  RunConfig resolved = rc;  // echo what was actually used
  resolved.dim = built.obj.dim();
  resolved.m = built.obj.sample_count();
  set_config_echo(rec, echo_config(resolved));
  return rec;
}

int cmd_run(const std::string& config_path, bool force) {
  const RunConfig rc = parse_run_config(config_path);
  RunRecord rec = run_one(rc);
  const fs::path csv = write_outputs(rec, rc.out_dir,
                                     rec.algorithm + "_" + rec.run_id, force);
  print_run_summary(rec, csv);
  return rec.diverged ? 2 : 0;
}

int cmd_compare(const std::string& config_path,
                const std::vector<std::string>& algorithms, bool force) {
  if (algorithms.size() < 2)
    throw ConfigParseError("compare needs at least two --algorithms");
  const RunConfig base = parse_run_config(config_path);
  const double thresholds[] = {1e-1, 3e-2, 1e-2};
  for (const std::string& name : algorithms)
    parse_algorithm(name);  // fail fast before any run writes output

  std::vector<RunRecord> recs;
  for (const std::string& name : algorithms) {
    RunConfig rc = base;
    rc.algorithm = name;
    recs.push_back(run_one(rc));
    write_outputs(recs.back(), base.out_dir,
                  recs.back().algorithm + "_" + recs.back().run_id, force);
  }

  fs::create_directories(base.out_dir);
  const fs::path sum_path = fs::path(base.out_dir) / "compare_summary.csv";
  if (!force && fs::exists(sum_path))
    throw IoError(sum_path.string() +
                  " already exists (pass --force to replace)");
  std::ofstream sum(sum_path);
  if (!sum) throw IoError("cannot write " + sum_path.string());
  sum << "algorithm,threshold,reached,iter,raw_evals,paper_cost\n";

  std::cout << std::left << std::setw(12) << "algorithm" << std::setw(11)
            << "threshold" << std::setw(8) << "iter" << std::setw(12)
            << "raw_evals" << std::setw(12) << "paper_cost" << "\n";
  for (const RunRecord& rec : recs) {
    for (double thr : thresholds) {
      const std::optional<CostAtThreshold> hit = cost_to_threshold(rec, thr);
      std::cout << std::left << std::setw(12) << rec.algorithm
                << std::setw(11) << short_num(thr);
      sum << rec.algorithm << "," << format_double(thr) << ",";
      if (hit) {
        std::cout << std::setw(8) << hit->iter << std::setw(12)
                  << hit->raw_evals << std::setw(12) << hit->paper_cost
                  << "\n";
        sum << "1," << hit->iter << "," << hit->raw_evals << ","
            << hit->paper_cost << "\n";
      } else {
        std::cout << "not reached\n";
        sum << "0,,,\n";
      }
    }
    if (rec.diverged)
      std::cout << rec.algorithm << " diverged at iteration "
                << rec.diverged_iter << "\n";
  }
  std::cout << "summary = " << sum_path.string() << "\n";

  return std::any_of(recs.begin(), recs.end(),
                     [](const RunRecord& r) { return r.diverged; })
             ? 2
             : 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::vector<std::string>& values,
              std::optional<double> sigma, bool force) {
  const RunConfig rc = parse_run_config(config_path);
  const SweepAxis axis = parse_sweep_axis(axis_name);
  BuiltExperiment built = build_experiment(rc);
  const std::vector<double> x0(built.obj.dim(), 0.0);

  std::vector<RunRecord> recs =
      sweep(built.obj, built.shards, built.algo, x0,
            static_cast<std::uint64_t>(rc.k_iters),
            static_cast<std::uint64_t>(rc.eval_stride), axis, values, sigma);

  bool any_diverged = false;
  std::cout << std::left << std::setw(28) << "tag" << std::setw(26)
            << "final_grad_norm" << "rows\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const std::string base = "sweep_" + sweep_axis_name(axis) + "_" +
                             sanitize(values[i]) + "_" + recs[i].run_id;
    write_outputs(recs[i], rc.out_dir, base, force);
    const MetricRow& last = recs[i].rows.back();
    std::cout << std::left << std::setw(28) << recs[i].tag << std::setw(26)
              << format_double(last.grad_norm_mean) << recs[i].rows.size();
    if (recs[i].diverged) {
      std::cout << "  diverged_at_iter=" << recs[i].diverged_iter;
      any_diverged = true;
    }
    std::cout << "\n";
  }
  return any_diverged ? 2 : 0;
}

int cmd_validate_topology(const std::string& path) {
  auto [entries, n] = read_matrix_file(path);
  const MixingMatrix w = unchecked_matrix(entries, n);
  std::cout << "n = " << w.n() << "\n";
  std::cout << "lambda2 = " << format_double(w.lambda2()) << "\n";
  std::cout << "lambda_n = " << format_double(w.lambda_n()) << "\n";
  if (w.admissible()) {
    std::cout << "verdict: ADMISSIBLE\n";
  } else {
    std::cout << "verdict: INADMISSIBLE (";
    if (!(w.lambda2() < 1.0)) {
      std::cout << "lambda2 = " << format_double(w.lambda2())
                << " must be < 1";
      if (!(w.lambda_n() > -1.0 / 3.0)) std::cout << "; ";
    }
    if (!(w.lambda_n() > -1.0 / 3.0))
      std::cout << "lambda_n = " << format_double(w.lambda_n())
                << " must be > -1/3";
    std::cout << ")\n";
  }
  return 0;
}

int cmd_theory(double lambda2, double lambda_n, double lipschitz,
               double sigma, double epsilon, double f0_gap, double zeta0,
               double grad0_norm, const std::string& bound_name, bool csv) {
  EtaBound variant = EtaBound::kAppendixProof;
  if (bound_name == "main-text") {
    variant = EtaBound::kMainText;
  } else if (bound_name == "appendix-statement") {
    variant = EtaBound::kAppendixStatement;
  } else if (bound_name != "appendix-proof") {
    throw ConfigParseError(
        "--eta-bound must be main-text, appendix-statement or appendix-proof");
  }

  // Spectrum constants first, then the schedule they imply, then the
  // schedule-dependent contraction margin d and the recommendation.
  const TheoryConstants pre =
      constants(lambda2, lambda_n, lipschitz, 0.0, 1, 1);
  const double eta = 0.9 * eta_max(lipschitz, pre.c2, variant);
  const long long s2 =
      std::max<long long>(1, static_cast<long long>(
                                 std::ceil(sigma / epsilon)));
  const TheoryConstants tc =
      constants(lambda2, lambda_n, lipschitz, eta, static_cast<int>(s2),
                static_cast<int>(s2));
  const ParamRecommendation rec =
      recommend(epsilon, sigma, lipschitz, pre.c1, pre.c2, tc.d, f0_gap,
                zeta0, grad0_norm, variant);

  if (csv) {
    std::cout << "lambda2,lambda_n,b_n,c1,c2,eta_max,d,epsilon,sigma,s1,s2,q,"
                 "eta,l,k_iterations,predicted_cost\n";
    std::cout << format_double(tc.lambda2) << "," << format_double(tc.lambda_n)
              << "," << format_double(tc.b_n) << "," << format_double(tc.c1)
              << "," << format_double(tc.c2) << ","
              << format_double(eta_max(lipschitz, pre.c2, variant)) << ","
              << format_double(tc.d) << "," << format_double(epsilon) << ","
              << format_double(sigma) << "," << rec.s1 << "," << rec.s2 << ","
              << rec.q << "," << format_double(rec.eta) << ","
              << format_double(rec.l) << "," << rec.k_iterations << ","
              << format_double(rec.predicted_cost) << "\n";
    return 0;
  }
  std::cout << "lambda2 = " << format_double(tc.lambda2) << "\n";
  std::cout << "lambda_n = " << format_double(tc.lambda_n) << "\n";
  std::cout << "b_n = " << format_double(tc.b_n) << "\n";
  std::cout << "c1 = " << format_double(tc.c1) << "\n";
  std::cout << "c2 = " << format_double(tc.c2) << "\n";
  std::cout << "eta_max = "
            << format_double(eta_max(lipschitz, pre.c2, variant)) << "\n";
  std::cout << "d = " << format_double(tc.d) << "\n";
  std::cout << "s1 = " << rec.s1 << "\n";
  std::cout << "s2 = " << rec.s2 << "\n";
  std::cout << "q = " << rec.q << "\n";
  std::cout << "eta = " << format_double(rec.eta) << "\n";
  std::cout << "l = " << format_double(rec.l) << "\n";
  std::cout << "k_iterations = " << rec.k_iterations << "\n";
  std::cout << "predicted_cost = " << format_double(rec.predicted_cost)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized variance-reduced optimization testbench"};
  app.require_subcommand(1);

  std::string config_path;
  bool force = false;

  CLI::App* c_run = app.add_subcommand(
      "run", "run one algorithm, write metrics CSV + config sidecar");
  c_run->add_option("config", config_path, "key=value run config file")
      ->required();
  c_run->add_flag("--force", force, "overwrite existing output files");

  std::vector<std::string> algorithms;
  CLI::App* c_cmp = app.add_subcommand(
      "compare", "run several algorithms on one problem, tabulate costs");
  c_cmp->add_option("config", config_path, "key=value run config file")
      ->required();
  c_cmp->add_option("--algorithms", algorithms,
                    "two or more of dspider,dpsgd,d2,cspider")
      ->required()
      ->delimiter(',');
  c_cmp->add_flag("--force", force, "overwrite existing output files");

  std::string axis_name;
  std::vector<std::string> values;
  double sigma_val = 0.0;
  CLI::App* c_swp = app.add_subcommand(
      "sweep", "vary one knob across runs under a shared master seed");
  c_swp->add_option("config", config_path, "key=value run config file")
      ->required();
  c_swp->add_option("--axis", axis_name,
                    "eta | epsilon | topology | mode | algorithm")
      ->required();
  c_swp->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',');
  CLI::Option* sigma_opt = c_swp->add_option(
      "--sigma", sigma_val, "variance proxy for the epsilon axis");
  c_swp->add_flag("--force", force, "overwrite existing output files");

  std::string matrix_path;
  CLI::App* c_top = app.add_subcommand(
      "validate-topology", "check a mixing-matrix file, print its spectrum");
  c_top->add_option("matrix", matrix_path, "matrix text file (n, then rows)")
      ->required();

  double t_l2 = 0.0, t_ln = 0.0, t_lip = 1.0, t_sigma = 1.0, t_eps = 0.1;
  double t_f0 = 1.0, t_zeta0 = 0.0, t_grad0 = 0.0;
  std::string t_bound = "appendix-proof";
  bool t_csv = false;
  CLI::App* c_thy = app.add_subcommand(
      "theory", "spectrum constants and parameter schedule for a target "
                "accuracy");
  c_thy->add_option("--lambda2", t_l2, "second-largest eigenvalue of W")
      ->required();
  c_thy->add_option("--lambda-n,--lambda_n", t_ln, "smallest eigenvalue of W")
      ->required();
  c_thy->add_option("--lipschitz,-L", t_lip, "gradient Lipschitz constant")
      ->required();
  c_thy->add_option("--sigma", t_sigma, "per-sample gradient variance bound")
      ->required();
  c_thy->add_option("--epsilon", t_eps, "target mean gradient norm")
      ->required();
  c_thy->add_option("--f0-gap,--f0_gap", t_f0, "f(x0) - inf f (default 1)");
  c_thy->add_option("--zeta0", t_zeta0, "worker heterogeneity at x0");
  c_thy->add_option("--grad0-norm,--grad0_norm", t_grad0,
                    "full gradient norm at x0");
  c_thy->add_option("--eta-bound,--eta_bound", t_bound,
                    "main-text | appendix-statement | appendix-proof");
  c_thy->add_flag("--csv", t_csv, "machine-readable one-row output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(c_run)) return cmd_run(config_path, force);
    if (app.got_subcommand(c_cmp))
      return cmd_compare(config_path, algorithms, force);
    if (app.got_subcommand(c_swp))
      return cmd_sweep(config_path, axis_name, values,
                       sigma_opt->count() ? std::optional<double>(sigma_val)
                                          : std::nullopt,
                       force);
    if (app.got_subcommand(c_top)) return cmd_validate_topology(matrix_path);
    if (app.got_subcommand(c_thy))
      return cmd_theory(t_l2, t_ln, t_lip, t_sigma, t_eps, t_f0, t_zeta0,
                        t_grad0, t_bound, t_csv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
