#include "mfstop/picard.hpp"

#include <cmath>

#include "mfstop/errors.hpp"

namespace mfstop {

ContractionSummary contraction_report(const FixedPointTrace& trace,
                                      const ObstacleSpec& spec) {
  ContractionSummary s;
  s.gamma1 = spec.gamma1;
  s.gamma2 = spec.gamma2;
  const auto r = trace.ratios();
  // Tail: everything after the first correction.
  s.geometric = true;
  for (std::size_t j = 0; j < r.size(); ++j) {
    s.max_tail_ratio = std::max(s.max_tail_ratio, r[j]);
    if (r[j] >= 1.0) s.geometric = false;
  }
  return s;
}

namespace {

void check_gate(const ObstacleSpec& spec, bool allow_out_of_gate) {
  if (spec.mode == ObstacleMode::Recursive && spec.lipschitz_flag &&
      !lipschitz_spot_check(spec))
    throw ConfigError("obstacle '" + spec.name +
                      "': declared Lipschitz constants fail the spot check");
  if (!allow_out_of_gate && !validate_spec(spec).wellposed)
    throw ConfigError("obstacle '" + spec.name +
                      "' fails the well-posedness gate; pass the override to "
                      "run anyway");
}

}  // namespace

// ---------------------------------------------------------------------------
// Lattice backend

LatticeSolution picard_interacting_lattice(const ObstacleSpec& spec,
                                           const LatticeModel& model,
                                           double tol_fp, int max_iters,
                                           PicardInit init,
                                           bool allow_out_of_gate) {
  check_gate(spec, allow_out_of_gate);
  model.check_cap();
  const int n = model.n, N = model.N;
  LatticeSolution sol;
  sol.model = model;
  sol.xi.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    sol.xi[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(1 << N), 0.0);
    for (int b = 0; b < (1 << N); ++b)
      sol.xi[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)] =
          spec.xi(model.state(i, N, b));
  }
  sol.Y.assign(static_cast<std::size_t>(n),
               TreeValues(static_cast<std::size_t>(model.nodes()), 0.0));
  if (init == PicardInit::FlatXi) {
    for (int i = 0; i < n; ++i) {
      double e = 0.0;
      for (double v : sol.xi[static_cast<std::size_t>(i)]) e += v;
      e /= static_cast<double>(1 << N);
      std::fill(sol.Y[static_cast<std::size_t>(i)].begin(),
                sol.Y[static_cast<std::size_t>(i)].end(), e);
    }
  }
  sol.L.assign(static_cast<std::size_t>(n),
               TreeValues(static_cast<std::size_t>(model.nodes()), 0.0));

  const bool state_driven = spec.mode == ObstacleMode::StateDriven;
  for (int it = 0; it < max_iters; ++it) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < N; ++k) {
        for (int b = 0; b < (1 << k); ++b) {
          const double own =
              state_driven
                  ? model.state(i, k, b)
                  : sol.Y[static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(LatticeModel::node_id(k, b))];
          const double obst = condexp_over_others(
              model, i, k, b, [&](const std::vector<int>& prefixes) {
                double mean = 0.0;
                for (int j = 0; j < n; ++j) {
                  mean +=
                      state_driven
                          ? model.state(j, k, prefixes[static_cast<std::size_t>(j)])
                          : sol.Y[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                                LatticeModel::node_id(k, prefixes[static_cast<std::size_t>(j)]))];
                }
                mean /= n;
                return spec.h(own, mean);
              });
          sol.L[static_cast<std::size_t>(i)]
               [static_cast<std::size_t>(LatticeModel::node_id(k, b))] = obst;
        }
      }
    }
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      TreeValues next = exact_lattice_value(
          model, sol.L[static_cast<std::size_t>(i)], [&](int b) {
            return sol.xi[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)];
          });
      for (std::size_t q = 0; q < next.size(); ++q)
        d = std::max(d,
                     std::fabs(next[q] - sol.Y[static_cast<std::size_t>(i)][q]));
      sol.Y[static_cast<std::size_t>(i)] = std::move(next);
    }
    sol.trace.distances.push_back(d);
    sol.trace.iterations = it + 1;
    if (d < tol_fp) {
      sol.trace.converged = true;
      return sol;
    }
  }
  throw NonConvergence("picard_interacting_lattice: no fixed point within " +
                           std::to_string(max_iters) + " iterations",
                       sol.trace.distances);
}

LatticeMeanfieldSolution picard_meanfield_lattice(const ObstacleSpec& spec,
                                                 const LatticeModel& model,
                                                 double tol_fp, int max_iters,
                                                 PicardInit init,
                                                 bool allow_out_of_gate) {
  if (model.n != 1)
    throw ConfigError("picard_meanfield_lattice: single-particle tree expected");
  check_gate(spec, allow_out_of_gate);
  model.check_cap();
  const int N = model.N;
  LatticeMeanfieldSolution sol;
  sol.model = model;
  sol.xi.assign(static_cast<std::size_t>(1 << N), 0.0);
  for (int b = 0; b < (1 << N); ++b)
    sol.xi[static_cast<std::size_t>(b)] = spec.xi(model.state(0, N, b));
  sol.Y.assign(static_cast<std::size_t>(model.nodes()), 0.0);
  if (init == PicardInit::FlatXi) {
    double e = 0.0;
    for (double v : sol.xi) e += v;
    e /= static_cast<double>(1 << N);
    std::fill(sol.Y.begin(), sol.Y.end(), e);
  }
  sol.L.assign(static_cast<std::size_t>(model.nodes()), 0.0);
  sol.mean.assign(static_cast<std::size_t>(N) + 1, 0.0);

  const bool state_driven = spec.mode == ObstacleMode::StateDriven;
  for (int it = 0; it < max_iters; ++it) {
    for (int k = 0; k < N; ++k) {
      double lvl = 0.0;
      if (state_driven) {
        for (int b = 0; b < (1 << k); ++b) lvl += model.state(0, k, b);
        lvl /= (1 << k);
      } else {
        lvl = tree_level_mean(sol.Y, k);
      }
      sol.mean[static_cast<std::size_t>(k)] = lvl;
      for (int b = 0; b < (1 << k); ++b) {
        const double own = state_driven
                               ? model.state(0, k, b)
                               : sol.Y[static_cast<std::size_t>(
                                     LatticeModel::node_id(k, b))];
        sol.L[static_cast<std::size_t>(LatticeModel::node_id(k, b))] =
            spec.h(own, lvl);
      }
    }
    sol.mean[static_cast<std::size_t>(N)] =
        state_driven ? [&] {
          double lvl = 0.0;
          for (int b = 0; b < (1 << N); ++b) lvl += model.state(0, N, b);
          return lvl / (1 << N);
        }()
                     : tree_level_mean(sol.Y, N);
    TreeValues next = exact_lattice_value(model, sol.L, [&](int b) {
      return sol.xi[static_cast<std::size_t>(b)];
    });
    double d = 0.0;
    for (std::size_t q = 0; q < next.size(); ++q)
      d = std::max(d, std::fabs(next[q] - sol.Y[q]));
    sol.Y = std::move(next);
    sol.trace.distances.push_back(d);
    sol.trace.iterations = it + 1;
    if (d < tol_fp) {
      sol.trace.converged = true;
      return sol;
    }
  }
  throw NonConvergence("picard_meanfield_lattice: no fixed point within " +
                           std::to_string(max_iters) + " iterations",
                       sol.trace.distances);
}

// ---------------------------------------------------------------------------
// Monte Carlo backend

namespace {

StateEnsemble brownian_paths(const DriverEnsemble& drivers, Exec exec) {
  StateEnsemble b;
  b.grid = drivers.grid;
  b.M = drivers.M;
  b.n = drivers.n;
  b.provenance = "brownian";
  b.X.resize(static_cast<std::size_t>(drivers.M) * drivers.n *
             (drivers.grid.N + 1));
  par_for(exec, static_cast<std::int64_t>(drivers.M) * drivers.n,
          [&](std::int64_t mi) {
            const int m = static_cast<int>(mi / drivers.n);
            const int i = static_cast<int>(mi % drivers.n);
            double s = 0.0;
            b.X[b.idx(m, i, 0)] = 0.0;
            for (int k = 0; k < drivers.grid.N; ++k) {
              s += drivers.at(m, i, k);
              b.X[b.idx(m, i, k + 1)] = s;
            }
          });
  return b;
}

std::vector<double> terminal_payoffs(const ObstacleSpec& spec,
                                     const StateEnsemble& state, Exec exec) {
  const int M = state.M, n = state.n, N = state.grid.N;
  std::vector<double> xi(static_cast<std::size_t>(M) * n);
  par_for(exec, static_cast<std::int64_t>(M) * n, [&](std::int64_t mi) {
    const int m = static_cast<int>(mi / n);
    const int i = static_cast<int>(mi % n);
    xi[static_cast<std::size_t>(mi)] = spec.xi(state.at(m, i, N));
  });
  return xi;
}

}  // namespace

McSolution picard_interacting_mc(const ObstacleSpec& spec,
                                 const DriverEnsemble& drivers,
                                 const RegressionSpec& reg, double tol_fp,
                                 int max_iters, bool allow_out_of_gate,
                                 Exec exec) {
  if (spec.mode != ObstacleMode::Recursive)
    throw ConfigError("picard_interacting_mc: recursive-mode spec expected");
  check_gate(spec, allow_out_of_gate);
  const int M = drivers.M, n = drivers.n, N = drivers.grid.N;
  const StateEnsemble B = brownian_paths(drivers, exec);
  McSolution sol;
  sol.xi = terminal_payoffs(spec, B, exec);
  const std::int64_t cells = static_cast<std::int64_t>(M) * n;

  const double xi_mean =
      det_sum(exec, cells,
              [&](std::int64_t mi) { return sol.xi[static_cast<std::size_t>(mi)]; }) /
      static_cast<double>(cells);
  std::vector<double> Yprev(static_cast<std::size_t>(cells) * (N + 1), xi_mean);
  auto yat = [&](int m, int i, int k) {
    return Yprev[(static_cast<std::size_t>(m) * n + i) * (N + 1) + k];
  };

  std::vector<double> L(static_cast<std::size_t>(cells) * N);
  std::vector<double> resp(static_cast<std::size_t>(cells));
  std::vector<double> feat(static_cast<std::size_t>(cells));
  std::vector<double> extra(static_cast<std::size_t>(cells));
  for (int it = 0; it < max_iters; ++it) {
    double noise = 0.0;
    for (int k = 0; k < N; ++k) {
      par_for(exec, M, [&](std::int64_t mm) {
        const int m = static_cast<int>(mm);
        double mean = 0.0;
        for (int j = 0; j < n; ++j) mean += yat(m, j, k);
        mean /= n;
        for (int i = 0; i < n; ++i) {
          resp[static_cast<std::size_t>(m) * n + i] = spec.h(yat(m, i, k), mean);
          feat[static_cast<std::size_t>(m) * n + i] = B.at(m, i, k);
          extra[static_cast<std::size_t>(m) * n + i] = yat(m, i, k);
        }
      });
      const auto fit = fit_condexp(resp, feat, extra, reg, exec);
      const int cols = reg.degree + 1 + (reg.include_extra_feature ? 1 : 0);
      noise = std::max(noise, fit.residual_scale *
                                  std::sqrt(cols / static_cast<double>(cells)));
      par_for(exec, cells, [&](std::int64_t mi) {
        L[static_cast<std::size_t>(mi) * N + k] =
            fit.fitted[static_cast<std::size_t>(mi)];
      });
    }
    ValueSurface vs = snell_backward_mc(L, sol.xi, B, reg, exec);
    const double d = det_max(exec, cells * (N + 1), [&](std::int64_t q) {
      return std::fabs(vs.Y[static_cast<std::size_t>(q)] -
                       Yprev[static_cast<std::size_t>(q)]);
    });
    Yprev = vs.Y;
    sol.values = std::move(vs);
    sol.obstacle_residual_scale = std::max(noise, sol.values.regression_noise);
    sol.trace.distances.push_back(d);
    sol.trace.iterations = it + 1;
    if (d < tol_fp) {
      sol.trace.converged = true;
      return sol;
    }
  }
  throw NonConvergence("picard_interacting_mc: no fixed point within " +
                           std::to_string(max_iters) + " iterations",
                       sol.trace.distances);
}

McMeanfieldSolution picard_meanfield_mc(const ObstacleSpec& spec,
                                        const DriverEnsemble& drivers,
                                        const RegressionSpec& reg,
                                        double tol_fp, int max_iters,
                                        bool allow_out_of_gate, Exec exec) {
  if (spec.mode != ObstacleMode::Recursive)
    throw ConfigError("picard_meanfield_mc: recursive-mode spec expected");
  check_gate(spec, allow_out_of_gate);
  const int M = drivers.M, n = drivers.n, N = drivers.grid.N;
  const StateEnsemble B = brownian_paths(drivers, exec);
  McMeanfieldSolution sol;
  sol.xi = terminal_payoffs(spec, B, exec);
  const std::int64_t cells = static_cast<std::int64_t>(M) * n;
  const double xi_mean =
      det_sum(exec, cells,
              [&](std::int64_t mi) { return sol.xi[static_cast<std::size_t>(mi)]; }) /
      static_cast<double>(cells);
  std::vector<double> Yprev(static_cast<std::size_t>(cells) * (N + 1), xi_mean);
  auto yat = [&](std::int64_t mi, int k) {
    return Yprev[static_cast<std::size_t>(mi) * (N + 1) + k];
  };

  std::vector<double> L(static_cast<std::size_t>(cells) * N);
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> mean(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k)
      mean[static_cast<std::size_t>(k)] =
          det_sum(exec, cells, [&](std::int64_t mi) { return yat(mi, k); }) /
          static_cast<double>(cells);
    // The value iterate is adapted, so no conditioning is needed here; the
    // obstacle is still passed through the same regression projection as
    // in the interacting solver so that coupled comparisons of the two
    // systems see identical smoothing.
    std::vector<double> resp(static_cast<std::size_t>(cells));
    std::vector<double> feat(static_cast<std::size_t>(cells));
    std::vector<double> extra(static_cast<std::size_t>(cells));
    for (int k = 0; k < N; ++k) {
      par_for(exec, cells, [&](std::int64_t mi) {
        resp[static_cast<std::size_t>(mi)] =
            spec.h(yat(mi, k), mean[static_cast<std::size_t>(k)]);
        feat[static_cast<std::size_t>(mi)] =
            B.at(static_cast<int>(mi / n), static_cast<int>(mi % n), k);
        extra[static_cast<std::size_t>(mi)] = yat(mi, k);
      });
      const auto fit = fit_condexp(resp, feat, extra, reg, exec);
      par_for(exec, cells, [&](std::int64_t mi) {
        L[static_cast<std::size_t>(mi) * N + k] =
            fit.fitted[static_cast<std::size_t>(mi)];
      });
    }
    ValueSurface vs = snell_backward_mc(L, sol.xi, B, reg, exec);
    const double d = det_max(exec, cells * (N + 1), [&](std::int64_t q) {
      return std::fabs(vs.Y[static_cast<std::size_t>(q)] -
                       Yprev[static_cast<std::size_t>(q)]);
    });
    Yprev = vs.Y;
    sol.values = std::move(vs);
    sol.obstacle_residual_scale = sol.values.regression_noise;
    sol.mean.values = std::move(mean);
    sol.mean.iteration_count = it + 1;
    sol.mean.residual = d;
    sol.trace.distances.push_back(d);
    sol.trace.iterations = it + 1;
    if (d < tol_fp) {
      sol.trace.converged = true;
      return sol;
    }
  }
  throw NonConvergence("picard_meanfield_mc: no fixed point within " +
                           std::to_string(max_iters) + " iterations",
                       sol.trace.distances);
}

McSolution solve_statedriven_interacting_mc(const ObstacleSpec& spec,
                                            const StateEnsemble& states,
                                            const RegressionSpec& reg,
                                            Exec exec) {
  if (spec.mode != ObstacleMode::StateDriven)
    throw ConfigError("solve_statedriven_interacting_mc: state-driven spec "
                      "expected");
  const int M = states.M, n = states.n, N = states.grid.N;
  McSolution sol;
  sol.xi = terminal_payoffs(spec, states, exec);
  const std::int64_t cells = static_cast<std::int64_t>(M) * n;
  std::vector<double> L(static_cast<std::size_t>(cells) * N);
  std::vector<double> resp(static_cast<std::size_t>(cells));
  std::vector<double> feat(static_cast<std::size_t>(cells));
  double noise = 0.0;
  for (int k = 0; k < N; ++k) {
    par_for(exec, M, [&](std::int64_t mm) {
      const int m = static_cast<int>(mm);
      double mean = 0.0;
      for (int j = 0; j < n; ++j) mean += states.at(m, j, k);
      mean /= n;
      for (int i = 0; i < n; ++i) {
        resp[static_cast<std::size_t>(m) * n + i] =
            spec.h(states.at(m, i, k), mean);
        feat[static_cast<std::size_t>(m) * n + i] = states.at(m, i, k);
      }
    });
    RegressionSpec rk = reg;
    rk.include_extra_feature = false;
    const auto fit = fit_condexp(resp, feat, {}, rk, exec);
    noise = std::max(noise, fit.residual_scale *
                                std::sqrt((reg.degree + 1.0) /
                                          static_cast<double>(cells)));
    par_for(exec, cells, [&](std::int64_t mi) {
      L[static_cast<std::size_t>(mi) * N + k] =
          fit.fitted[static_cast<std::size_t>(mi)];
    });
  }
  sol.values = snell_backward_mc(L, sol.xi, states, reg, exec);
  sol.obstacle_residual_scale = std::max(noise, sol.values.regression_noise);
  sol.trace.distances = {0.0};
  sol.trace.iterations = 1;
  sol.trace.converged = true;
  return sol;
}

McMeanfieldSolution solve_statedriven_meanfield_mc(
    const ObstacleSpec& spec, const StateEnsemble& states,
    const std::vector<double>& state_mean, const RegressionSpec& reg,
    Exec exec) {
  if (spec.mode != ObstacleMode::StateDriven)
    throw ConfigError("solve_statedriven_meanfield_mc: state-driven spec "
                      "expected");
  const int M = states.M, n = states.n, N = states.grid.N;
  if (state_mean.size() != static_cast<std::size_t>(N) + 1)
    throw ConfigError("solve_statedriven_meanfield_mc: mean function shape");
  McMeanfieldSolution sol;
  sol.xi = terminal_payoffs(spec, states, exec);
  const std::int64_t cells = static_cast<std::int64_t>(M) * n;
  std::vector<double> L(static_cast<std::size_t>(cells) * N);
  par_for(exec, cells, [&](std::int64_t mi) {
    const int m = static_cast<int>(mi / n);
    const int i = static_cast<int>(mi % n);
    for (int k = 0; k < N; ++k)
      L[static_cast<std::size_t>(mi) * N + k] =
          spec.h(states.at(m, i, k), state_mean[static_cast<std::size_t>(k)]);
  });
  sol.values = snell_backward_mc(L, sol.xi, states, reg, exec);
  sol.obstacle_residual_scale = sol.values.regression_noise;
  sol.mean.values = state_mean;
  sol.trace.distances = {0.0};
  sol.trace.iterations = 1;
  sol.trace.converged = true;
  return sol;
}

}  // namespace mfstop
