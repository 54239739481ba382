#pragma once

#include <vector>

#include "mfstop/lattice.hpp"
#include "mfstop/obstacle.hpp"
#include "mfstop/snell.hpp"

namespace mfstop {

struct FixedPointTrace {
  std::vector<double> distances;  // d_r = sup |Y^(r+1) - Y^(r)|
  int iterations = 0;
  bool converged = false;

  std::vector<double> ratios() const {
    std::vector<double> r;
    for (std::size_t j = 1; j < distances.size(); ++j)
      if (distances[j - 1] > 0.0) r.push_back(distances[j] / distances[j - 1]);
    return r;
  }
};

struct ContractionSummary {
  double max_tail_ratio = 0.0;
  bool geometric = false;
  double gamma1 = 0.0, gamma2 = 0.0;
};

ContractionSummary contraction_report(const FixedPointTrace& trace,
                                      const ObstacleSpec& spec);

enum class PicardInit { FlatXi, Zero };

// ---------------------------------------------------------------------------
// Lattice backend (exact conditional expectations)

struct LatticeSolution {
  LatticeModel model;
  std::vector<TreeValues> Y;   // per particle, all nodes
  std::vector<TreeValues> L;   // per particle, obstacle at nodes with k < N
  std::vector<TreeValues> xi;  // per particle, terminal payoff per full path
  FixedPointTrace trace;
};

// Interacting system: the obstacle of particle i at node (k, b) is the
// exact average over the other particles' length-k branches of
// h(own value, empirical mean), or of h(own state, empirical state mean)
// in state-driven mode.
LatticeSolution picard_interacting_lattice(const ObstacleSpec& spec,
                                           const LatticeModel& model,
                                           double tol_fp = 1e-8,
                                           int max_iters = 50,
                                           PicardInit init = PicardInit::FlatXi,
                                           bool allow_out_of_gate = false);

// Mean-field limit on a single-particle tree: the empirical mean is
// replaced by the deterministic level mean of the current iterate.
struct LatticeMeanfieldSolution {
  LatticeModel model;
  TreeValues Y, L, xi;
  std::vector<double> mean;  // deterministic mean per level
  FixedPointTrace trace;
};

LatticeMeanfieldSolution picard_meanfield_lattice(
    const ObstacleSpec& spec, const LatticeModel& model, double tol_fp = 1e-8,
    int max_iters = 50, PicardInit init = PicardInit::FlatXi,
    bool allow_out_of_gate = false);

// ---------------------------------------------------------------------------
// Monte Carlo backend (regression conditional expectations)

struct McSolution {
  ValueSurface values;
  std::vector<double> xi;  // (m, i)
  FixedPointTrace trace;
  double obstacle_residual_scale = 0.0;  // regression noise floor for Z
};

// Recursive interacting system driven by the Brownian paths themselves:
// the regression feature of particle i at t_k is its own path state.
McSolution picard_interacting_mc(const ObstacleSpec& spec,
                                 const DriverEnsemble& drivers,
                                 const RegressionSpec& reg,
                                 double tol_fp = 1e-4, int max_iters = 50,
                                 bool allow_out_of_gate = false,
                                 Exec exec = Exec::Parallel);

struct McMeanfieldSolution {
  ValueSurface values;
  std::vector<double> xi;
  MeanFunction mean;  // deterministic mean of the value process
  FixedPointTrace trace;
  double obstacle_residual_scale = 0.0;
};

// Mean-field recursive system: particles are i.i.d. copies, the coupling
// goes through the cross-scenario (and cross-particle) average.
McMeanfieldSolution picard_meanfield_mc(const ObstacleSpec& spec,
                                        const DriverEnsemble& drivers,
                                        const RegressionSpec& reg,
                                        double tol_fp = 1e-4,
                                        int max_iters = 50,
                                        bool allow_out_of_gate = false,
                                        Exec exec = Exec::Parallel);

// State-driven problems need no fixed point: a single regression obstacle
// pass followed by backward induction.
McSolution solve_statedriven_interacting_mc(const ObstacleSpec& spec,
                                            const StateEnsemble& states,
                                            const RegressionSpec& reg,
                                            Exec exec = Exec::Parallel);

McMeanfieldSolution solve_statedriven_meanfield_mc(
    const ObstacleSpec& spec, const StateEnsemble& states,
    const std::vector<double>& state_mean, const RegressionSpec& reg,
    Exec exec = Exec::Parallel);

}  // namespace mfstop
