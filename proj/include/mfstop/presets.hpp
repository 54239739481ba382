#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfstop/coefficients.hpp"
#include "mfstop/exec.hpp"
#include "mfstop/obstacle.hpp"
#include "mfstop/time_grid.hpp"

namespace mfstop {

// A named problem: dynamics, performance function, starting point.
struct ProblemPreset {
  std::string name;
  CoefficientSpec coefficients;
  ObstacleSpec obstacle;
  double initial = 0.0;
  double delta = 1.0;  // initial-sequence spread for the markov variant
  std::string doc;
};

// "recursive-linear", "state-call", "variance", "markov-variance".
std::vector<ProblemPreset> builtin_presets();
ProblemPreset find_preset(const std::string& name);

// States along a binary-tree walk under Euler steps of the given
// coefficients (increments +-sqrt(dt), mean coupling ignored). Node-indexed,
// levels 0..N.
std::vector<double> euler_state_tree(const CoefficientSpec& coef, double x0,
                                     int N, double dt);

enum class CMatchBackend { Lattice, MonteCarlo };

struct CMatchResult {
  double c_star = 0.0;
  double residual = 0.0;  // |estimate of E_x[X_tau] - c_star| at the end
  double se = 0.0;        // MC standard error of the final estimate
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// Matching iteration for the auxiliary centered problem: solve the
// standard stopping problem with obstacle (x - c)^2, read off the hitting
// rule, update c toward the mean of the stopped state. Damped:
// c <- (1 - damping) c + damping * estimate.
CMatchResult pedersen_c_match(const ProblemPreset& preset, double x,
                              const TimeGrid& grid, int M,
                              std::uint64_t seed, double c0,
                              CMatchBackend backend, double tol_c = 1e-6,
                              int max_iters = 60, double damping = 0.5,
                              Exec exec = Exec::Parallel);

// One run per starting point; distinct fixed points may coexist, so all
// results are reported rather than collapsed.
std::vector<CMatchResult> pedersen_c_match_multi(
    const ProblemPreset& preset, double x, const TimeGrid& grid, int M,
    std::uint64_t seed, const std::vector<double>& starts,
    CMatchBackend backend, double tol_c = 1e-6, int max_iters = 60,
    double damping = 0.5, Exec exec = Exec::Parallel);

}  // namespace mfstop
