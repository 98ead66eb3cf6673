#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dspider/algorithms.hpp"
#include "dspider/problems.hpp"
#include "dspider/topology.hpp"

// Flat key=value run configuration. Unknown keys are rejected with a
// suggestion; missing keys take the defaults below; the resolved config is
// echoed verbatim into the run sidecar, which is itself a valid config file.

namespace dspider {

struct RunConfig {
  std::string algorithm = "dspider";
  int n = 8;
  std::string topology = "ring";  // ring | complete | file:<path>
  std::string objective = "nonconvex-logistic";
  int dim = 20;
  int m = 4000;
  double reg_alpha = 0.1;
  std::string partition_mode = "shuffled";
  double eta = 0.05;
  int q = 16;
  int s1 = 256;
  int s2 = 16;
  long long k_iters = 1000;  // key: K
  std::uint64_t seed = 1;
  int eval_stride = 10;
  std::string out_dir = "out";
  // extensions beyond the core key set, defaults keep the standard behaviour
  std::string sample_mode = "with-replacement";
  double label_noise = kDefaultLabelNoise;
  std::string data_csv;  // when set, dim and m come from the file
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text,
                                const std::string& origin);

// Canonical text form; parse(echo(c)) == c.
std::string echo_config(const RunConfig& config);

struct BuiltExperiment {
  Objective obj;
  std::vector<Shard> shards;
  AlgoConfig algo;
};

// Materializes objective, topology, shards and algorithm config.
BuiltExperiment build_experiment(const RunConfig& config);

}  // namespace dspider
