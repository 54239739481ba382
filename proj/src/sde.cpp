#include "mfstop/sde.hpp"

#include <cmath>

#include "mfstop/errors.hpp"

namespace mfstop {

namespace {

constexpr double kDivergenceBound = 1e12;

void check_finite(double x, int m, int i, int k) {
  if (!std::isfinite(x) || std::fabs(x) > kDivergenceBound)
    throw SimulationDiverged(m, i, k,
                             "simulation diverged at scenario " +
                                 std::to_string(m) + ", particle " +
                                 std::to_string(i) + ", step " +
                                 std::to_string(k));
}

}  // namespace

StateEnsemble simulate_interacting(const DriverEnsemble& drivers,
                                   const CoefficientSpec& coeffs,
                                   const std::vector<double>& initials,
                                   Exec exec) {
  const int n = drivers.n, M = drivers.M, N = drivers.grid.N;
  if (static_cast<int>(initials.size()) != n)
    throw ConfigError("simulate_interacting: initials/particles mismatch");
  StateEnsemble ens;
  ens.grid = drivers.grid;
  ens.M = M;
  ens.n = n;
  ens.provenance = "interacting:" + coeffs.name;
  ens.X.resize(static_cast<std::size_t>(M) * n * (N + 1));
  const double dt = drivers.grid.dt();
  // Per-scenario stepping: the empirical mean is a reduction inside the
  // scenario, so scenarios are independent work items.
  par_for(exec, M, [&](std::int64_t mm) {
    const int m = static_cast<int>(mm);
    for (int i = 0; i < n; ++i) ens.X[ens.idx(m, i, 0)] = initials[i];
    for (int k = 0; k < N; ++k) {
      const double t = drivers.grid.node(k);
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += ens.at(m, i, k);
      mean /= n;
      for (int i = 0; i < n; ++i) {
        const double x = ens.at(m, i, k);
        const double next = x + coeffs.b(t, x, mean) * dt +
                            coeffs.sigma(t, x, mean) * drivers.at(m, i, k);
        check_finite(next, m, i, k + 1);
        ens.X[ens.idx(m, i, k + 1)] = next;
      }
    }
  });
  return ens;
}

namespace {

// One frozen-mean sweep: every particle is stepped against mean_fn, not
// against the other particles.
void simulate_frozen_mean(const DriverEnsemble& drivers,
                          const CoefficientSpec& coeffs,
                          const std::vector<double>& initials,
                          const std::vector<double>& mean_fn,
                          StateEnsemble& ens, Exec exec) {
  const int n = drivers.n, M = drivers.M, N = drivers.grid.N;
  const double dt = drivers.grid.dt();
  par_for(exec, static_cast<std::int64_t>(M) * n, [&](std::int64_t mi) {
    const int m = static_cast<int>(mi / n);
    const int i = static_cast<int>(mi % n);
    ens.X[ens.idx(m, i, 0)] = initials[static_cast<std::size_t>(i)];
    for (int k = 0; k < N; ++k) {
      const double t = drivers.grid.node(k);
      const double z = mean_fn[static_cast<std::size_t>(k)];
      const double x = ens.at(m, i, k);
      const double next = x + coeffs.b(t, x, z) * dt +
                          coeffs.sigma(t, x, z) * drivers.at(m, i, k);
      check_finite(next, m, i, k + 1);
      ens.X[ens.idx(m, i, k + 1)] = next;
    }
  });
}

}  // namespace

std::pair<StateEnsemble, MeanFunction> simulate_mckean_vlasov(
    const DriverEnsemble& drivers, const CoefficientSpec& coeffs,
    double initial, double tol, int max_iters, Exec exec) {
  if (!(tol > 0.0)) throw ConfigError("simulate_mckean_vlasov: tol must be > 0");
  const int n = drivers.n, M = drivers.M, N = drivers.grid.N;
  StateEnsemble ens;
  ens.grid = drivers.grid;
  ens.M = M;
  ens.n = n;
  ens.provenance = "mckean-vlasov:" + coeffs.name;
  ens.X.resize(static_cast<std::size_t>(M) * n * (N + 1));
  const std::vector<double> initials(static_cast<std::size_t>(n), initial);
  std::vector<double> mean(static_cast<std::size_t>(N) + 1, initial);
  std::vector<double> trace;
  const std::int64_t cells = static_cast<std::int64_t>(M) * n;
  for (int it = 0; it < max_iters; ++it) {
    simulate_frozen_mean(drivers, coeffs, initials, mean, ens, exec);
    double residual = 0.0;
    std::vector<double> next(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) {
      const double avg = det_sum(exec, cells,
                                 [&](std::int64_t mi) {
                                   return ens.at(static_cast<int>(mi / n),
                                                 static_cast<int>(mi % n), k);
                                 }) /
                         static_cast<double>(cells);
      next[static_cast<std::size_t>(k)] = avg;
      residual = std::max(residual,
                          std::fabs(avg - mean[static_cast<std::size_t>(k)]));
    }
    mean = next;
    trace.push_back(residual);
    if (residual < tol) {
      // Paths already reflect a mean within tol of the returned one; one
      // final sweep pins them to the converged mean exactly.
      simulate_frozen_mean(drivers, coeffs, initials, mean, ens, exec);
      MeanFunction mf;
      mf.values = mean;
      mf.iteration_count = it + 1;
      mf.residual = residual;
      return {ens, mf};
    }
  }
  throw NonConvergence("simulate_mckean_vlasov: mean iteration did not reach "
                       "tolerance",
                       trace);
}

std::vector<double> InitialSequenceRule::starts(double x, int n) const {
  std::vector<double> v(static_cast<std::size_t>(n));
  v[0] = x;
  for (int i = 2; i <= n; ++i)
    v[static_cast<std::size_t>(i - 1)] = x + delta / i;
  for (double s : v)
    if (!std::isfinite(s))
      throw ConfigError("initial-sequence rule produced a non-finite start");
  return v;
}

StateEnsemble simulate_markov_family(const DriverEnsemble& drivers,
                                     const CoefficientSpec& coeffs, double x,
                                     const InitialSequenceRule& rule,
                                     Exec exec) {
  const int n = drivers.n, M = drivers.M, N = drivers.grid.N;
  StateEnsemble ens;
  ens.grid = drivers.grid;
  ens.M = M;
  ens.n = n;
  ens.provenance = "markov-family:" + coeffs.name;
  ens.X.resize(static_cast<std::size_t>(M) * n * (N + 1));
  const std::vector<double> initials = rule.starts(x, n);
  const double dt = drivers.grid.dt();
  par_for(exec, static_cast<std::int64_t>(M) * n, [&](std::int64_t mi) {
    const int m = static_cast<int>(mi / n);
    const int i = static_cast<int>(mi % n);
    ens.X[ens.idx(m, i, 0)] = initials[static_cast<std::size_t>(i)];
    for (int k = 0; k < N; ++k) {
      const double t = drivers.grid.node(k);
      const double xk = ens.at(m, i, k);
      const double next = xk + coeffs.b(t, xk, 0.0) * dt +
                          coeffs.sigma(t, xk, 0.0) * drivers.at(m, i, k);
      check_finite(next, m, i, k + 1);
      ens.X[ens.idx(m, i, k + 1)] = next;
    }
  });
  return ens;
}

}  // namespace mfstop
