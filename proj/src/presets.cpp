#include "mfstop/presets.hpp"

#include <cmath>
#include <cstdlib>

#include "mfstop/errors.hpp"
#include "mfstop/lattice.hpp"
#include "mfstop/sde.hpp"
#include "mfstop/snell.hpp"
#include "mfstop/stopping.hpp"

namespace mfstop {

std::vector<ProblemPreset> builtin_presets() {
  std::vector<ProblemPreset> out;

  {
    ProblemPreset p;
    p.name = "recursive-linear";
    p.coefficients = make_coefficients("driftless");
    p.obstacle.name = "linear";
    p.obstacle.gamma1 = 0.2;
    p.obstacle.gamma2 = 0.1;
    p.obstacle.h = [](double y, double z) { return 0.2 * y + 0.1 * z; };
    // Sign-changing terminal payoff so that the obstacle actually binds on
    // low paths; with a nonnegative payoff the linear reward sits strictly
    // below the continuation value everywhere.
    p.obstacle.xi = [](double w) { return w; };
    p.obstacle.mode = ObstacleMode::Recursive;
    p.doc = "linear recursive reward 0.2*Y + 0.1*E[Y] on a Brownian driver, "
            "inside the contraction gate";
    out.push_back(std::move(p));
  }
  {
    ProblemPreset p;
    p.name = "state-call";
    p.coefficients = make_coefficients("driftless");
    p.obstacle.name = "call";
    p.obstacle.gamma1 = 1.0;
    p.obstacle.gamma2 = 0.0;
    p.obstacle.h = [](double x, double) { return std::max(x - 0.5, 0.0); };
    p.obstacle.xi = [](double w) { return std::max(w - 0.5, 0.0); };
    p.obstacle.mode = ObstacleMode::StateDriven;
    p.doc = "call payoff (x - 0.5)+ on the state, no mean coupling; a "
            "classical stopping problem";
    out.push_back(std::move(p));
  }
  {
    ProblemPreset p;
    p.name = "variance";
    p.coefficients = make_coefficients("driftless");
    p.obstacle.name = "variance";
    p.obstacle.h = [](double x, double m) { return (x - m) * (x - m); };
    p.obstacle.xi = [](double w) { return w * w; };
    p.obstacle.mode = ObstacleMode::StateDriven;
    p.obstacle.lipschitz_flag = false;
    p.doc = "variance reward (x - mean)^2; quadratic growth, outside the "
            "Lipschitz framework";
    out.push_back(std::move(p));
  }
  {
    ProblemPreset p;
    p.name = "markov-variance";
    p.coefficients = make_coefficients("driftless");
    p.obstacle.name = "variance";
    p.obstacle.h = [](double x, double m) { return (x - m) * (x - m); };
    p.obstacle.xi = [](double w) { return w * w; };
    p.obstacle.mode = ObstacleMode::StateDriven;
    p.obstacle.lipschitz_flag = false;
    p.delta = 1.0;
    p.doc = "variance reward on an independent Markov family started along "
            "the sequence x, x + d/2, x + d/3, ...";
    out.push_back(std::move(p));
  }
  return out;
}

ProblemPreset find_preset(const std::string& name) {
  for (ProblemPreset& p : builtin_presets())
    if (p.name == name) return std::move(p);
  throw ConfigError("unknown preset: " + name);
}

std::vector<double> euler_state_tree(const CoefficientSpec& coef, double x0,
                                     int N, double dt) {
  std::vector<double> tree(static_cast<std::size_t>((1 << (N + 1)) - 1), 0.0);
  tree[0] = x0;
  const double sdt = std::sqrt(dt);
  for (int k = 0; k < N; ++k) {
    const double t = k * dt;
    for (int b = 0; b < (1 << k); ++b) {
      const double x =
          tree[static_cast<std::size_t>(LatticeModel::node_id(k, b))];
      const double drift = coef.b(t, x, x) * dt;
      const double vol = coef.sigma(t, x, x) * sdt;
      tree[static_cast<std::size_t>(LatticeModel::node_id(k + 1, b))] =
          x + drift - vol;
      tree[static_cast<std::size_t>(
          LatticeModel::node_id(k + 1, b | (1 << k)))] = x + drift + vol;
    }
  }
  return tree;
}

namespace {

// One matching step on the lattice: exact value of the c-centered problem,
// then the exact mean of the state at the hitting time.
double lattice_stopped_mean(const std::vector<double>& states, int N,
                            double c) {
  std::vector<double> L(states.size(), 0.0);
  for (int k = 0; k < N; ++k)
    for (int b = 0; b < (1 << k); ++b) {
      const std::size_t id =
          static_cast<std::size_t>(LatticeModel::node_id(k, b));
      L[id] = (states[id] - c) * (states[id] - c);
    }
  LatticeModel model;
  model.n = 1;
  model.N = N;
  const TreeValues Y = exact_lattice_value(model, L, [&](int b) {
    const double s = states[static_cast<std::size_t>(
        LatticeModel::node_id(N, b))];
    return (s - c) * (s - c);
  });
  double mean = 0.0;
  for (int p = 0; p < (1 << N); ++p) {
    int tau = N;
    for (int k = 0; k < N; ++k) {
      const std::size_t id = static_cast<std::size_t>(
          LatticeModel::node_id(k, p & ((1 << k) - 1)));
      if (Y[id] - L[id] <= 1e-10) {
        tau = k;
        break;
      }
    }
    mean += states[static_cast<std::size_t>(
        LatticeModel::node_id(tau, p & ((1 << tau) - 1)))];
  }
  return mean / (1 << N);
}

struct McStep {
  double mean = 0.0;
  double se = 0.0;
};

McStep mc_stopped_mean(const StateEnsemble& states, double c,
                       const RegressionSpec& reg, Exec exec) {
  const int M = states.M, N = states.grid.N;
  std::vector<double> L(static_cast<std::size_t>(M) * N);
  std::vector<double> xi(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < N; ++k) {
      const double d = states.at(m, 0, k) - c;
      L[static_cast<std::size_t>(m) * N + k] = d * d;
    }
    const double d = states.at(m, 0, N) - c;
    xi[static_cast<std::size_t>(m)] = d * d;
  }
  ValueSurface vs = snell_backward_mc(L, xi, states, reg, exec);
  StoppingReport rep = compute_z_and_hit(vs, -1.0, exec);
  double mean = 0.0;
  for (int m = 0; m < M; ++m) mean += states.at(m, 0, rep.hit(m, 0));
  mean /= M;
  double ss = 0.0;
  for (int m = 0; m < M; ++m) {
    const double d = states.at(m, 0, rep.hit(m, 0)) - mean;
    ss += d * d;
  }
  McStep step;
  step.mean = mean;
  step.se = M > 1 ? std::sqrt(ss / (M - 1.0) / M) : 0.0;
  return step;
}

}  // namespace

CMatchResult pedersen_c_match(const ProblemPreset& preset, double x,
                              const TimeGrid& grid, int M,
                              std::uint64_t seed, double c0,
                              CMatchBackend backend, double tol_c,
                              int max_iters, double damping, Exec exec) {
  CMatchResult res;
  double c = c0;
  res.trace.push_back(c);

  StateEnsemble states;
  std::vector<double> tree;
  RegressionSpec reg;
  if (backend == CMatchBackend::MonteCarlo) {
    DriverEnsemble drivers = sample_drivers(grid, 1, M, seed, exec);
    InitialSequenceRule rule;
    rule.delta = 0.0;
    states = simulate_markov_family(drivers, preset.coefficients, x, rule,
                                    exec);
  } else {
    tree = euler_state_tree(preset.coefficients, x, grid.N, grid.dt());
  }

  for (int it = 0; it < max_iters; ++it) {
    McStep step;
    if (backend == CMatchBackend::Lattice)
      step.mean = lattice_stopped_mean(tree, grid.N, c);
    else
      step = mc_stopped_mean(states, c, reg, exec);
    const double next = (1.0 - damping) * c + damping * step.mean;
    res.iterations = it + 1;
    res.residual = std::fabs(step.mean - c);
    res.se = step.se;
    const bool done = std::fabs(next - c) < tol_c;
    c = next;
    res.trace.push_back(c);
    if (done) {
      res.c_star = c;
      res.converged = true;
      return res;
    }
  }
  throw NonConvergence("pedersen_c_match: no matching point within " +
                           std::to_string(max_iters) + " iterations",
                       res.trace);
}

std::vector<CMatchResult> pedersen_c_match_multi(
    const ProblemPreset& preset, double x, const TimeGrid& grid, int M,
    std::uint64_t seed, const std::vector<double>& starts,
    CMatchBackend backend, double tol_c, int max_iters, double damping,
    Exec exec) {
  std::vector<CMatchResult> out;
  out.reserve(starts.size());
  for (double c0 : starts)
    out.push_back(pedersen_c_match(preset, x, grid, M, seed, c0, backend,
                                   tol_c, max_iters, damping, exec));
  return out;
}

}  // namespace mfstop
