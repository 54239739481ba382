#pragma once

#include <iosfwd>
#include <vector>

#include "mfstop/obstacle.hpp"
#include "mfstop/picard.hpp"
#include "mfstop/rules.hpp"
#include "mfstop/snell.hpp"

namespace mfstop {

// Gap process Z = Y - L and the first-hit stopping indices.
struct StoppingReport {
  int M = 0, n = 0, N = 0;
  std::vector<double> Z;             // (m, i, k), k < N
  std::vector<int> hit_index;        // (m, i); N when Z never dips below tol
  std::vector<double> reward;        // per-particle reward estimate
  std::vector<double> reward_se;     // per-particle standard error
  double tol_hit = 0.0;

  std::size_t zidx(int m, int i, int k) const {
    return (static_cast<std::size_t>(m) * n + i) * N + k;
  }
  int hit(int m, int i) const {
    return hit_index[static_cast<std::size_t>(m) * n + i];
  }
};

// Z and hitting indices from a value surface. The default tolerance is the
// regression noise band (2x the fitted-value noise, floored at 1e-6); pass
// an explicit tol_hit to override.
StoppingReport compute_z_and_hit(const ValueSurface& values,
                                 double tol_hit = -1.0,
                                 Exec exec = Exec::Parallel);

// Hitting rule of a lattice solution for particle i (Z <= tol at the node).
StoppingRule hitting_rule_lattice(const LatticeSolution& sol, int i,
                                  double tol_hit = 1e-10);
StoppingRule hitting_rule_lattice(const LatticeMeanfieldSolution& sol,
                                  double tol_hit = 1e-10);

enum class RewardMode { Interacting, MeanField };

struct RewardEstimate {
  double value = 0.0;
  double se = 0.0;
};

// Monte Carlo estimate of the expected reward of a stopping rule given by
// per-(scenario, particle) indices. V is the process entering h (the value
// surface in recursive mode, the states in state-driven mode), laid out
// (m, i, k) with k = 0..N. In interacting mode the mean argument is the
// within-scenario particle average at the stopping index; in mean-field
// mode it is the cross-scenario average of the stopped values, a scalar
// functional of the rule as a whole.
RewardEstimate evaluate_rule_mc(const std::vector<int>& stop_index,
                                const std::vector<double>& V,
                                const std::vector<double>& xi, int M, int n,
                                int N, const ObstacleSpec& spec,
                                RewardMode mode, int particle,
                                Exec exec = Exec::Parallel);

// One CSV row per scenario x particle: hit index, stopped state, stopped
// value, reward term.
void write_stopping_csv(std::ostream& os, const StoppingReport& report,
                        const ValueSurface& values);

}  // namespace mfstop
