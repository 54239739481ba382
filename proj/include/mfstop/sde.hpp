#pragma once

#include <string>
#include <vector>

#include "mfstop/coefficients.hpp"
#include "mfstop/drivers.hpp"

namespace mfstop {

// Simulated states X[m][i][k] for k = 0..N.
struct StateEnsemble {
  TimeGrid grid;
  int M = 0, n = 0;
  std::string provenance;
  std::vector<double> X;  // layout (m, i, k), k = 0..N

  std::size_t idx(int m, int i, int k) const {
    return (static_cast<std::size_t>(m) * n + i) * (grid.N + 1) + k;
  }
  double at(int m, int i, int k) const { return X[idx(m, i, k)]; }
};

// Frozen deterministic mean m(t_k) with the Picard bookkeeping that
// produced it.
struct MeanFunction {
  std::vector<double> values;  // per grid node, k = 0..N
  int iteration_count = 0;
  double residual = 0.0;
};

// Weakly interacting system: the coupling argument is the within-scenario
// empirical mean of the particle states.
StateEnsemble simulate_interacting(const DriverEnsemble& drivers,
                                   const CoefficientSpec& coeffs,
                                   const std::vector<double>& initials,
                                   Exec exec = Exec::Parallel);

// Decoupled system: frozen-mean Picard iteration. Every particle sees only
// its own driver, so the returned paths are independent across particles.
std::pair<StateEnsemble, MeanFunction> simulate_mckean_vlasov(
    const DriverEnsemble& drivers, const CoefficientSpec& coeffs,
    double initial, double tol, int max_iters, Exec exec = Exec::Parallel);

// Initial points for the Markov family: x_1 = x exactly, x_i = x + delta/i
// for i >= 2.
struct InitialSequenceRule {
  double delta = 0.0;
  std::vector<double> starts(double x, int n) const;
};

// Independent time-homogeneous diffusions started at rule.starts(x, n);
// particle 1 is the reference diffusion started at x.
StateEnsemble simulate_markov_family(const DriverEnsemble& drivers,
                                     const CoefficientSpec& coeffs, double x,
                                     const InitialSequenceRule& rule,
                                     Exec exec = Exec::Parallel);

}  // namespace mfstop
