#include "mfstop/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mfstop/errors.hpp"

namespace mfstop {

StoppingReport compute_z_and_hit(const ValueSurface& values, double tol_hit,
                                 Exec exec) {
  const int M = values.M, n = values.n, N = values.N;
  if (values.L.empty())
    throw ConfigError("compute_z_and_hit: value surface has no obstacle");
  StoppingReport rep;
  rep.M = M;
  rep.n = n;
  rep.N = N;
  rep.tol_hit = tol_hit >= 0.0
                    ? tol_hit
                    : std::max(1e-6, 2.0 * values.regression_noise);
  rep.Z.resize(static_cast<std::size_t>(M) * n * N);
  rep.hit_index.assign(static_cast<std::size_t>(M) * n, N);
  par_for(exec, static_cast<std::int64_t>(M) * n, [&](std::int64_t mi) {
    const int m = static_cast<int>(mi / n);
    const int i = static_cast<int>(mi % n);
    int hit = N;
    for (int k = 0; k < N; ++k) {
      const double z = values.y(m, i, k) - values.l(m, i, k);
      rep.Z[rep.zidx(m, i, k)] = z;
      if (hit == N && z <= rep.tol_hit) hit = k;
    }
    rep.hit_index[static_cast<std::size_t>(mi)] = hit;
  });
  return rep;
}

namespace {

StoppingRule hitting_rule_from_trees(const TreeValues& Y, const TreeValues& L,
                                     int N, double tol_hit) {
  StoppingRule r;
  r.N = N;
  r.stop.assign(static_cast<std::size_t>((1 << N) - 1), 0);
  // Canonical form: mark a node only if no ancestor already stopped.
  for (int b = 0; b < (1 << N); ++b) {
    for (int k = 0; k < N; ++k) {
      const int prefix = b & ((1 << k) - 1);
      const std::size_t id =
          static_cast<std::size_t>(LatticeModel::node_id(k, prefix));
      if (Y[id] - L[id] <= tol_hit) {
        r.stop[id] = 1;
        break;
      }
    }
  }
  return r;
}

}  // namespace

StoppingRule hitting_rule_lattice(const LatticeSolution& sol, int i,
                                  double tol_hit) {
  return hitting_rule_from_trees(sol.Y[static_cast<std::size_t>(i)],
                                 sol.L[static_cast<std::size_t>(i)],
                                 sol.model.N, tol_hit);
}

StoppingRule hitting_rule_lattice(const LatticeMeanfieldSolution& sol,
                                  double tol_hit) {
  return hitting_rule_from_trees(sol.Y, sol.L, sol.model.N, tol_hit);
}

RewardEstimate evaluate_rule_mc(const std::vector<int>& stop_index,
                                const std::vector<double>& V,
                                const std::vector<double>& xi, int M, int n,
                                int N, const ObstacleSpec& spec,
                                RewardMode mode, int particle, Exec exec) {
  if (stop_index.size() != static_cast<std::size_t>(M) * n)
    throw ConfigError("evaluate_rule_mc: stop index shape mismatch");
  auto vat = [&](int m, int i, int k) {
    return V[(static_cast<std::size_t>(m) * n + i) * (N + 1) + k];
  };
  for (int m = 0; m < M; ++m) {
    const int tau = stop_index[static_cast<std::size_t>(m) * n + particle];
    if (tau < 0 || tau > N)
      throw ConfigError("evaluate_rule_mc: stopping index out of range");
  }
  double mean_arg_scalar = 0.0;
  if (mode == RewardMode::MeanField) {
    // Rule-level scalar: the unconditional expectation of the stopped
    // process under this rule. This is the source of time-inconsistency.
    mean_arg_scalar =
        det_sum(exec, M,
                [&](std::int64_t mm) {
                  const int m = static_cast<int>(mm);
                  const int tau =
                      stop_index[static_cast<std::size_t>(m) * n + particle];
                  return vat(m, particle, tau);
                }) /
        static_cast<double>(M);
  }
  auto term = [&](int m) {
    const int tau = stop_index[static_cast<std::size_t>(m) * n + particle];
    if (tau == N) return xi[static_cast<std::size_t>(m) * n + particle];
    double z = mean_arg_scalar;
    if (mode == RewardMode::Interacting) {
      z = 0.0;
      for (int j = 0; j < n; ++j) z += vat(m, j, tau);
      z /= n;
    }
    return spec.h(vat(m, particle, tau), z);
  };
  const double sum =
      det_sum(exec, M, [&](std::int64_t m) { return term(static_cast<int>(m)); });
  const double mean = sum / M;
  const double ss = det_sum(exec, M, [&](std::int64_t m) {
    const double d = term(static_cast<int>(m)) - mean;
    return d * d;
  });
  RewardEstimate est;
  est.value = mean;
  est.se = M > 1 ? std::sqrt(ss / (M - 1.0) / M) : 0.0;
  return est;
}

void write_stopping_csv(std::ostream& os, const StoppingReport& report,
                        const ValueSurface& values) {
  os << "scenario,particle,hit_index,stopped_value,stopped_obstacle,gap\n";
  char buf[160];
  for (int m = 0; m < report.M; ++m) {
    for (int i = 0; i < report.n; ++i) {
      const int k = report.hit(m, i);
      const double y = values.y(m, i, k);
      const double l = k < report.N ? values.l(m, i, k) : y;
      std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g,%.17g\n", m, i, k,
                    y, l, y - l);
      os << buf;
    }
  }
}

}  // namespace mfstop
