#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mfstop {

// Bad user-supplied configuration (grids, gammas, caps, rule parameters).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A path left the admissible range during SDE stepping.
struct SimulationDiverged : std::runtime_error {
  int scenario, particle, step;
  SimulationDiverged(int m, int i, int k, const std::string& what)
      : std::runtime_error(what), scenario(m), particle(i), step(k) {}
};

// Fixed-point or c-matching iteration ran out of iterations.
// Carries the residual trace for post-mortem.
struct NonConvergence : std::runtime_error {
  std::vector<double> residuals;
  NonConvergence(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), residuals(std::move(trace)) {}
};

// Exact enumeration asked for more joint paths than the configured cap.
struct InstanceTooLarge : std::runtime_error {
  std::uint64_t required_cap;
  InstanceTooLarge(const std::string& what, std::uint64_t cap)
      : std::runtime_error(what), required_cap(cap) {}
};

// Rank-deficient regression design with no ridge.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mfstop
