#include "mfstop/oracle.hpp"

#include <cmath>
#include <cstdint>

#include "mfstop/errors.hpp"

namespace mfstop {

std::vector<TreeValues> lattice_state_trees(const LatticeModel& model) {
  std::vector<TreeValues> trees(static_cast<std::size_t>(model.n));
  for (int i = 0; i < model.n; ++i) {
    TreeValues& t = trees[static_cast<std::size_t>(i)];
    t.assign(static_cast<std::size_t>(model.nodes()), 0.0);
    for (int k = 0; k <= model.N; ++k)
      for (int b = 0; b < (1 << k); ++b)
        t[static_cast<std::size_t>(LatticeModel::node_id(k, b))] =
            model.state(i, k, b);
  }
  return trees;
}

namespace {

// Value of particle i's tree at its stop index along a full path; falls
// through to the level-N node when the rule never stops early.
double stopped_tree_value(const TreeValues& tree, const StoppingRule& rule,
                          int path, int N) {
  const int tau = rule.stop_index(path);
  return tree[static_cast<std::size_t>(
      LatticeModel::node_id(tau, path & ((1 << tau) - 1)))];
}

}  // namespace

double exact_rule_value(const LatticeModel& model,
                        const std::vector<TreeValues>& V,
                        const std::vector<TreeValues>& xi,
                        const StoppingRule& rule, const ObstacleSpec& spec,
                        RewardMode mode, int particle) {
  model.check_cap();
  const int n = model.n, N = model.N;
  if (particle < 0 || particle >= n)
    throw ConfigError("exact_rule_value: particle index out of range");
  const std::uint64_t own_paths = std::uint64_t{1} << N;
  const std::uint64_t other_paths = std::uint64_t{1} << (N * (n - 1));

  double mean_scalar = 0.0;
  if (mode == RewardMode::MeanField) {
    double s = 0.0;
    for (std::uint64_t p = 0; p < own_paths; ++p)
      s += stopped_tree_value(V[static_cast<std::size_t>(particle)], rule,
                              static_cast<int>(p), N);
    mean_scalar = s / static_cast<double>(own_paths);
  }

  double total = 0.0;
  for (std::uint64_t p = 0; p < own_paths; ++p) {
    const int path = static_cast<int>(p);
    const int tau = rule.stop_index(path);
    if (tau == N) {
      total += xi[static_cast<std::size_t>(particle)][p] *
               static_cast<double>(other_paths);
      continue;
    }
    const int node =
        LatticeModel::node_id(tau, path & ((1 << tau) - 1));
    const double own = V[static_cast<std::size_t>(particle)]
                        [static_cast<std::size_t>(node)];
    if (mode == RewardMode::MeanField) {
      total += spec.h(own, mean_scalar) * static_cast<double>(other_paths);
      continue;
    }
    // Interacting: average h(own, empirical mean at tau) over the other
    // particles' joint branches of length tau.
    for (std::uint64_t q = 0; q < other_paths; ++q) {
      double acc = own;
      std::uint64_t rest = q;
      for (int j = 0; j < n; ++j) {
        if (j == particle) continue;
        const int pj = static_cast<int>(rest & (own_paths - 1));
        rest >>= N;
        acc += V[static_cast<std::size_t>(j)][static_cast<std::size_t>(
            LatticeModel::node_id(tau, pj & ((1 << tau) - 1)))];
      }
      total += spec.h(own, acc / n);
    }
  }
  return total / (static_cast<double>(own_paths) *
                  static_cast<double>(other_paths));
}

OracleResult brute_force_optimal(const LatticeModel& model,
                                 const std::vector<TreeValues>& V,
                                 const std::vector<TreeValues>& xi,
                                 const ObstacleSpec& spec, RewardMode mode,
                                 int particle) {
  const std::vector<StoppingRule> rules = enumerate_rules(model.N);
  OracleResult res;
  res.rule_values.reserve(rules.size());
  for (const StoppingRule& r : rules)
    res.rule_values.push_back(
        exact_rule_value(model, V, xi, r, spec, mode, particle));
  res.best = res.rule_values[0];
  for (double v : res.rule_values) res.best = std::max(res.best, v);
  for (std::size_t id = 0; id < res.rule_values.size(); ++id)
    if (res.rule_values[id] >= res.best - 1e-12)
      res.optimal_rule_ids.push_back(static_cast<int>(id));
  return res;
}

OracleResult brute_force_optimal(const LatticeSolution& sol,
                                 const ObstacleSpec& spec, int particle) {
  const std::vector<TreeValues>& V =
      spec.mode == ObstacleMode::Recursive
          ? sol.Y
          : lattice_state_trees(sol.model);
  return brute_force_optimal(sol.model, V, sol.xi, spec,
                             RewardMode::Interacting, particle);
}

OracleResult brute_force_optimal(const LatticeMeanfieldSolution& sol,
                                 const ObstacleSpec& spec) {
  std::vector<TreeValues> V;
  if (spec.mode == ObstacleMode::Recursive)
    V.push_back(sol.Y);
  else
    V = lattice_state_trees(sol.model);
  return brute_force_optimal(sol.model, V, {sol.xi}, spec,
                             RewardMode::MeanField, 0);
}

double bellman_probe(const LatticeMeanfieldSolution& sol,
                     const ObstacleSpec& spec, MeanStyle style) {
  const int N = sol.model.N;
  if (sol.model.n != 1)
    throw ConfigError("bellman_probe: mean-field probe needs n = 1");
  if (N < 2)
    throw ConfigError("bellman_probe: needs at least two steps");
  const TreeValues& V = spec.mode == ObstacleMode::Recursive
                            ? sol.Y
                            : lattice_state_trees(sol.model)[0];

  // Tail rules from t_1 on: one depth N-1 subrule per level-1 node. The
  // subrule node (k', p') sits at the global node (k'+1, b | p'<<1).
  const std::vector<StoppingRule> subs = enumerate_rules(N - 1);
  const int paths = 1 << N;

  auto tau_of = [&](const StoppingRule& sub, int path) {
    return 1 + sub.stop_index(path >> 1);
  };
  auto stopped_value = [&](const StoppingRule& sub, int path) {
    const int tau = tau_of(sub, path);
    return V[static_cast<std::size_t>(
        LatticeModel::node_id(tau, path & ((1 << tau) - 1)))];
  };
  auto reward = [&](const StoppingRule& sub, int path, double mu) {
    const int tau = tau_of(sub, path);
    if (tau == N) return sol.xi[static_cast<std::size_t>(path)];
    const double own = V[static_cast<std::size_t>(
        LatticeModel::node_id(tau, path & ((1 << tau) - 1)))];
    const double z = style == MeanStyle::RuleScalar
                         ? mu
                         : sol.mean[static_cast<std::size_t>(tau)];
    return spec.h(own, z);
  };

  double worst = 0.0;
  for (int b = 0; b < 2; ++b) {
    double best = -1e300;
    for (const StoppingRule& rb : subs) {
      for (const StoppingRule& rother : subs) {
        // The other node's subrule enters only through the rule-level mean.
        double mu = 0.0;
        if (style == MeanStyle::RuleScalar) {
          for (int p = 0; p < paths; ++p)
            mu += stopped_value((p & 1) == b ? rb : rother, p);
          mu /= paths;
        }
        double cond = 0.0;
        for (int p = 0; p < paths; ++p)
          if ((p & 1) == b) cond += reward(rb, p, mu);
        cond /= paths / 2;
        best = std::max(best, cond);
        if (style == MeanStyle::FrozenMean) break;
      }
    }
    worst = std::max(
        worst, std::abs(sol.Y[static_cast<std::size_t>(
                            LatticeModel::node_id(1, b))] -
                        best));
  }
  return worst;
}

}  // namespace mfstop
