#pragma once

#include <cstdint>
#include <vector>

#include "mfstop/coefficients.hpp"
#include "mfstop/exec.hpp"
#include "mfstop/sde.hpp"
#include "mfstop/snell.hpp"
#include "mfstop/time_grid.hpp"

namespace mfstop {

struct EstimateWithSE {
  double value = 0.0;
  double se = 0.0;
};

// sup over particles of the MC estimate of E[sup_k |A - B|^2], for two
// surfaces laid out (m, i, k) with K time points per cell and coupled
// drivers. SE by scenario-level bootstrap (200 deterministic resamples).
EstimateWithSE s2_distance(const std::vector<double>& A,
                           const std::vector<double>& B, int M, int n, int K,
                           std::uint64_t seed, Exec exec = Exec::Parallel);

EstimateWithSE s2_distance(const ValueSurface& A, const ValueSurface& B,
                           std::uint64_t seed, Exec exec = Exec::Parallel);

// Fraction of scenarios whose hitting times differ by more than eps (in
// time units), with binomial SE. Indices are per scenario, coupled runs.
EstimateWithSE tau_deviation_prob(const std::vector<int>& hit_n,
                                  const std::vector<int>& hit_ref, double dt,
                                  double eps);

struct ExchangeabilityReport {
  double stat = 0.0;  // max studentized pairwise difference of Y_0 means
  bool symmetric = true;
  std::vector<double> particle_means;
  std::vector<double> particle_se;
};

// Per-particle Y_0 summary comparison on a nominally symmetric instance.
// Asymmetric initials only raise the flag; the statistic is still computed.
ExchangeabilityReport exchangeability_stat(const ValueSurface& values,
                                           const std::vector<double>& initials);

struct LlnTable {
  std::vector<int> ns;
  std::vector<double> gap;  // E[sup_k |empirical mean path - reference|^2]
  std::vector<double> se;
  double slope = 0.0;  // least-squares slope of log gap vs log n
};

// Decoupled family: per n, simulate M independent n-particle systems with
// the coupling argument frozen to the reference, averaging paths on the
// fly so that memory stays O(N). Needs at least 3 n-points for the slope
// fit.
LlnTable lln_gap(const CoefficientSpec& coef, double x0, const TimeGrid& grid,
                 const std::vector<int>& ns, int M,
                 const std::vector<double>& reference, std::uint64_t seed,
                 Exec exec = Exec::Parallel);

// Gap between the finite-n conditional variance obstacle of particle 0 and
// its mean-field limit (x - E[X])^2, estimated as E[sup_k |difference|]
// on a decoupled driftless-style ensemble. Moments of the other particles
// are taken across scenarios.
EstimateWithSE variance_obstacle_gap(const StateEnsemble& states,
                                     std::uint64_t seed,
                                     Exec exec = Exec::Parallel);

struct ConvergenceRow {
  int n = 0;
  EstimateWithSE s2;
  EstimateWithSE tau_dev;
  EstimateWithSE reward_gap;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double eps = 0.0;
  std::uint64_t seed = 0;
  int M = 0;
};

// Strict trend check: every consecutive drop exceeds twice the combined
// standard error.
bool decreasing_beyond_noise(const std::vector<EstimateWithSE>& xs);

// Lenient trend check: consecutive steps may rise by at most twice the
// combined standard error.
bool trend_holds(const std::vector<EstimateWithSE>& xs);

}  // namespace mfstop
