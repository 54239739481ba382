#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mfstop {

enum class ObstacleMode {
  Recursive,    // reward h(Y_tau, mean of Y at tau)
  StateDriven,  // reward h(X_tau, mean of X at tau)
};

// Performance function with declared Lipschitz constants, terminal payoff,
// and mode flags. The constants are trusted but spot-checked at load time.
struct ObstacleSpec {
  std::string name;
  std::function<double(double, double)> h;  // h(y, z) or h(x, m)
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::function<double(double)> xi;  // terminal payoff from terminal state
  ObstacleMode mode = ObstacleMode::Recursive;
  bool lipschitz_flag = true;
};

struct ValidationReport {
  bool wellposed = false;       // gamma1^2 + gamma2^2 < 1/2
  bool convergence_ok = false;  // gamma1^2 + gamma2^2 < 1/16
  std::vector<std::string> messages;
};

ValidationReport validate_spec(const ObstacleSpec& spec);

// Checks the declared Lipschitz bound on `pairs` random argument pairs.
// Returns true when no sampled pair violates the bound.
bool lipschitz_spot_check(const ObstacleSpec& spec, int pairs = 1000,
                          std::uint64_t seed = 0x10b5u);

}  // namespace mfstop
