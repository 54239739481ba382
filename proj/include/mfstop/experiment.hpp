#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfstop/exec.hpp"

namespace mfstop {

// One experiment run, filled from a JSON config file plus CLI overrides.
struct ExperimentConfig {
  std::string kind;  // oracle-suite, recursive-converge, sde-converge,
                     // variance-demo, markov-demo, pedersen-match,
                     // bellman-probe
  std::string preset_name;
  std::uint64_t seed = 0;
  bool has_seed = false;  // the seed is mandatory
  double T = 1.0;
  int N = 8;
  int M = 2000;
  std::vector<int> n_grid;
  double eps = -1.0;  // tau-deviation threshold; default 2 * dt
  double x = 0.0;     // starting point for markov/pedersen runs
  std::vector<double> c_starts;
  std::string out_dir = "out";
  Exec exec = Exec::Parallel;
};

// Parses the JSON text of a config file; malformed fields are reported
// with their path.
ExperimentConfig config_from_json_text(const std::string& text);

struct ExperimentResult {
  bool ok = false;
  std::vector<std::string> summary;  // one [PASS]/[FAIL]/[INFO] line each
};

// Runs the experiment and writes the bundle (manifest.json, CSV tables,
// summary.txt) under config.out_dir. The manifest is written even when a
// module error aborts the run; the error text is carried verbatim.
// Returns 0 iff every built-in assertion passed.
int run_experiment(const ExperimentConfig& config);

}  // namespace mfstop
