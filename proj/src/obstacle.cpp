#include "mfstop/obstacle.hpp"

#include <cmath>

#include "mfstop/errors.hpp"
#include "mfstop/rng.hpp"

namespace mfstop {

ValidationReport validate_spec(const ObstacleSpec& spec) {
  if (spec.gamma1 < 0.0 || spec.gamma2 < 0.0)
    throw ConfigError("validate_spec: Lipschitz constants must be nonnegative");
  ValidationReport rep;
  const double g = spec.gamma1 * spec.gamma1 + spec.gamma2 * spec.gamma2;
  if (spec.mode == ObstacleMode::StateDriven) {
    // No contraction is needed when the obstacle is driven by the state
    // rather than the value process itself.
    rep.wellposed = true;
    rep.convergence_ok = true;
    if (!spec.lipschitz_flag)
      rep.messages.push_back(
          "non-Lipschitz obstacle: convergence rests on the quadratic-"
          "obstacle argument, not on the Lipschitz gates");
    return rep;
  }
  if (!spec.lipschitz_flag) {
    rep.wellposed = false;
    rep.convergence_ok = false;
    rep.messages.push_back(
        "recursive mode requires a Lipschitz performance function; the "
        "contraction gates do not apply");
    return rep;
  }
  rep.wellposed = g < 0.5;
  rep.convergence_ok = g < 0.0625;
  if (!rep.wellposed)
    rep.messages.push_back("gamma1^2+gamma2^2 >= 1/2: uniqueness gate failed");
  else if (!rep.convergence_ok)
    rep.messages.push_back(
        "gamma1^2+gamma2^2 in [1/16, 1/2): unique value process, but the "
        "particle-limit gate is not met");
  return rep;
}

bool lipschitz_spot_check(const ObstacleSpec& spec, int pairs,
                          std::uint64_t seed) {
  if (!spec.lipschitz_flag) return true;
  // Small absolute slack so boundary-tight h (e.g. gamma1*y) passes in
  // floating point.
  const double slack = 1e-12;
  for (int p = 0; p < pairs; ++p) {
    const auto a = normal_pair(seed, static_cast<std::uint32_t>(p), 0, 0);
    const auto b = normal_pair(seed, static_cast<std::uint32_t>(p), 1, 0);
    const double y1 = 3.0 * a[0], z1 = 3.0 * a[1];
    const double y2 = 3.0 * b[0], z2 = 3.0 * b[1];
    const double lhs = std::fabs(spec.h(y1, z1) - spec.h(y2, z2));
    const double rhs = spec.gamma1 * std::fabs(y1 - y2) +
                       spec.gamma2 * std::fabs(z1 - z2) + slack;
    if (lhs > rhs) return false;
  }
  return true;
}

}  // namespace mfstop
