#pragma once

#include <vector>

#include "mfstop/lattice.hpp"
#include "mfstop/obstacle.hpp"
#include "mfstop/picard.hpp"
#include "mfstop/rules.hpp"
#include "mfstop/stopping.hpp"

namespace mfstop {

// Exact expected reward of a stopping rule on a lattice instance. V holds
// the process entering h (the value trees in recursive mode, the state
// trees in state-driven mode), one node-indexed tree per particle with
// level N filled; xi holds the terminal payoff per full path prefix.
// In interacting mode the mean argument at tau is the empirical average of
// the other trees at the same node level; in mean-field mode it is the
// exact unconditional mean of the stopped process under the rule, one
// scalar per rule.
double exact_rule_value(const LatticeModel& model,
                        const std::vector<TreeValues>& V,
                        const std::vector<TreeValues>& xi,
                        const StoppingRule& rule, const ObstacleSpec& spec,
                        RewardMode mode, int particle);

struct OracleResult {
  double best = 0.0;
  std::vector<int> optimal_rule_ids;  // indices into enumerate_rules(N)
  std::vector<double> rule_values;    // one exact value per enumerated rule
};

// Score every enumerated adapted rule exactly and return the maximum plus
// the eps-optimal set (absolute tolerance 1e-12).
OracleResult brute_force_optimal(const LatticeModel& model,
                                 const std::vector<TreeValues>& V,
                                 const std::vector<TreeValues>& xi,
                                 const ObstacleSpec& spec, RewardMode mode,
                                 int particle);

// Convenience wrappers that pick V from a converged solution: the value
// trees for recursive obstacles, the state trees for state-driven ones.
OracleResult brute_force_optimal(const LatticeSolution& sol,
                                 const ObstacleSpec& spec, int particle);
OracleResult brute_force_optimal(const LatticeMeanfieldSolution& sol,
                                 const ObstacleSpec& spec);

// How the mean argument is scored in the dynamic-programming probe.
enum class MeanStyle {
  RuleScalar,  // E[V_tau] recomputed per tail rule (the paper's reading)
  FrozenMean   // deterministic level mean of the converged process
};

// Checks the dynamic-programming identity at the first interior time t_1:
// compares Y at each level-1 node against the conditional value of the
// best tail rule (all pairs of depth N-1 subrules). Returns the largest
// absolute discrepancy over the level-1 nodes. With no mean coupling, or
// with the frozen-mean scoring, the discrepancy vanishes; with a genuine
// mean coupling and rule-scalar scoring it does not.
double bellman_probe(const LatticeMeanfieldSolution& sol,
                     const ObstacleSpec& spec, MeanStyle style);

// State trees of a lattice model (one per particle, node-indexed).
std::vector<TreeValues> lattice_state_trees(const LatticeModel& model);

}  // namespace mfstop
