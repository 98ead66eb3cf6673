#include "dspider/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "dspider/errors.hpp"
#include "dspider/harness.hpp"  // format_double

namespace dspider {
namespace {

const char* const kKnownKeys[] = {
    "algorithm", "n",   "topology", "objective",      "dim",
    "m",         "reg_alpha", "partition_mode", "eta", "q",
    "s1",        "s2",  "K",        "seed",           "eval_stride",
    "out_dir",   "sample_mode", "label_noise", "data_csv",
};

// Common spellings from other tools map straight to our key.
const std::pair<const char*, const char*> kAliases[] = {
    {"learning_rate", "eta"},  {"lr", "eta"},       {"step_size", "eta"},
    {"workers", "n"},          {"nodes", "n"},      {"iterations", "K"},
    {"iters", "K"},            {"steps", "K"},      {"batch_size", "s2"},
    {"alpha", "reg_alpha"},    {"stride", "eval_stride"},
    {"output", "out_dir"},     {"outdir", "out_dir"},
    {"partition", "partition_mode"}, {"noise", "label_noise"},
    {"data", "data_csv"},
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t prev = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t cur = row[j];
      std::size_t sub = prev + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
      prev = cur;
    }
  }
  return row[b.size()];
}

std::string suggest_key(const std::string& key) {
  for (const auto& [alias, target] : kAliases) {
    if (key == alias) return target;
  }
  std::string best;
  std::size_t best_dist = 4;  // only suggest close misses
  for (const char* known : kKnownKeys) {
    std::size_t d = edit_distance(key, known);
    if (d < best_dist) {
      best_dist = d;
      best = known;
    }
  }
  return best;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw ConfigParseError(key + ": expected an integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigParseError(key + ": expected an integer, got '" + value + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigParseError(key + ": expected a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigParseError(key + ": expected a number, got '" + value + "'");
  return v;
}

void apply(RunConfig& c, const std::string& key, const std::string& value,
           const std::string& origin, int line_no) {
  auto where = [&] {
    return origin + ":" + std::to_string(line_no) + ": ";
  };
  if (key == "algorithm") {
    parse_algorithm(value);  // validates
    c.algorithm = value;
  } else if (key == "n") {
    c.n = static_cast<int>(parse_int(key, value));
    if (c.n < 1) throw ConfigParseError(where() + "n must be >= 1");
  } else if (key == "topology") {
    if (value != "ring" && value != "complete" &&
        value.rfind("file:", 0) != 0)
      throw ConfigParseError(where() +
                             "topology must be ring, complete or file:<path>");
    c.topology = value;
  } else if (key == "objective") {
    parse_objective_kind(value);
    c.objective = value;
  } else if (key == "dim") {
    c.dim = static_cast<int>(parse_int(key, value));
    if (c.dim < 1) throw ConfigParseError(where() + "dim must be >= 1");
  } else if (key == "m") {
    c.m = static_cast<int>(parse_int(key, value));
    if (c.m < 1) throw ConfigParseError(where() + "m must be >= 1");
  } else if (key == "reg_alpha") {
    c.reg_alpha = parse_real(key, value);
    if (c.reg_alpha < 0)
      throw ConfigParseError(where() + "reg_alpha must be >= 0");
  } else if (key == "partition_mode") {
    parse_partition_mode(value);
    c.partition_mode = value;
  } else if (key == "eta") {
    c.eta = parse_real(key, value);
    if (!(c.eta > 0)) throw ConfigParseError(where() + "eta must be > 0");
  } else if (key == "q") {
    c.q = static_cast<int>(parse_int(key, value));
    if (c.q < 1) throw ConfigParseError(where() + "q must be >= 1");
  } else if (key == "s1") {
    c.s1 = static_cast<int>(parse_int(key, value));
    if (c.s1 < 1) throw ConfigParseError(where() + "s1 must be >= 1");
  } else if (key == "s2") {
    c.s2 = static_cast<int>(parse_int(key, value));
    if (c.s2 < 1) throw ConfigParseError(where() + "s2 must be >= 1");
  } else if (key == "K") {
    c.k_iters = parse_int(key, value);
    if (c.k_iters < 1) throw ConfigParseError(where() + "K must be >= 1");
  } else if (key == "seed") {
    long long v = parse_int(key, value);
    if (v < 0) throw ConfigParseError(where() + "seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "eval_stride") {
    c.eval_stride = static_cast<int>(parse_int(key, value));
    if (c.eval_stride < 1)
      throw ConfigParseError(where() + "eval_stride must be >= 1");
  } else if (key == "out_dir") {
    if (value.empty()) throw ConfigParseError(where() + "out_dir is empty");
    c.out_dir = value;
  } else if (key == "sample_mode") {
    parse_sample_mode(value);
    c.sample_mode = value;
  } else if (key == "label_noise") {
    c.label_noise = parse_real(key, value);
    if (c.label_noise < 0)
      throw ConfigParseError(where() + "label_noise must be >= 0");
  } else if (key == "data_csv") {
    c.data_csv = value;
  } else {
    std::string msg = where() + "unknown key '" + key + "'";
    std::string hint = suggest_key(key);
    if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
    throw ConfigParseError(msg);
  }
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text,
                                const std::string& origin) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError(origin + ":" + std::to_string(line_no) +
                             ": expected key=value, got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigParseError(origin + ":" + std::to_string(line_no) +
                             ": empty key");
    apply(c, key, value, origin, line_no);
  }
  return c;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str(), path);
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  out << "algorithm=" << c.algorithm << "\n";
  out << "n=" << c.n << "\n";
  out << "topology=" << c.topology << "\n";
  out << "objective=" << c.objective << "\n";
  out << "dim=" << c.dim << "\n";
  out << "m=" << c.m << "\n";
  out << "reg_alpha=" << format_double(c.reg_alpha) << "\n";
  out << "partition_mode=" << c.partition_mode << "\n";
  out << "eta=" << format_double(c.eta) << "\n";
  out << "q=" << c.q << "\n";
  out << "s1=" << c.s1 << "\n";
  out << "s2=" << c.s2 << "\n";
  out << "K=" << c.k_iters << "\n";
  out << "seed=" << c.seed << "\n";
  out << "eval_stride=" << c.eval_stride << "\n";
  out << "out_dir=" << c.out_dir << "\n";
  out << "sample_mode=" << c.sample_mode << "\n";
  out << "label_noise=" << format_double(c.label_noise) << "\n";
  out << "data_csv=" << c.data_csv << "\n";
  return out.str();
}

BuiltExperiment build_experiment(const RunConfig& c) {
  ObjectiveKind kind = parse_objective_kind(c.objective);
  Objective obj =
      c.data_csv.empty()
          ? make_synthetic(kind, c.dim, c.m, c.seed, c.reg_alpha,
                           c.label_noise)
          : import_csv(c.data_csv, kind, c.reg_alpha);

  std::shared_ptr<const MixingMatrix> topo;
  if (c.topology == "ring") {
    topo = std::make_shared<MixingMatrix>(build_ring(c.n));
  } else if (c.topology == "complete") {
    topo = std::make_shared<MixingMatrix>(build_complete(c.n));
  } else {
    MixingMatrix w = load_matrix(c.topology.substr(5));
    if (w.n() != c.n)
      throw ConfigParseError("topology file is " + std::to_string(w.n()) +
                             "x" + std::to_string(w.n()) + " but n=" +
                             std::to_string(c.n));
    topo = std::make_shared<MixingMatrix>(std::move(w));
  }

  std::vector<Shard> shards =
      partition(obj, c.n, parse_partition_mode(c.partition_mode), c.seed);

  AlgoConfig algo;
  algo.algorithm = parse_algorithm(c.algorithm);
  algo.eta = c.eta;
  algo.q = c.q;
  algo.s1 = c.s1;
  algo.s2 = c.s2;
  algo.sample_mode = parse_sample_mode(c.sample_mode);
  algo.topology = topo;
  algo.seed = c.seed;
  return BuiltExperiment{std::move(obj), std::move(shards), std::move(algo)};
}

}  // namespace dspider
