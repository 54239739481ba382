#pragma once

#include <string>
#include <vector>

#include "mfstop/regression.hpp"
#include "mfstop/sde.hpp"

namespace mfstop {

// Per-(scenario, particle, time) value estimates. Y is defined for
// k = 0..N (Y at N is the terminal payoff); obstacle L and continuation C
// for k < N.
struct ValueSurface {
  int M = 0, n = 0, N = 0;
  std::vector<double> Y;  // (m, i, k), k = 0..N
  std::vector<double> L;  // (m, i, k), k < N
  std::vector<double> C;  // (m, i, k), k < N
  std::string backend;
  // Max over k of the fitted-value noise scale of the continuation
  // regressions, residual RMS * sqrt(columns / scenarios).
  double regression_noise = 0.0;

  std::size_t yidx(int m, int i, int k) const {
    return (static_cast<std::size_t>(m) * n + i) * (N + 1) + k;
  }
  std::size_t lidx(int m, int i, int k) const {
    return (static_cast<std::size_t>(m) * n + i) * N + k;
  }
  double y(int m, int i, int k) const { return Y[yidx(m, i, k)]; }
  double l(int m, int i, int k) const { return L[lidx(m, i, k)]; }
  double c(int m, int i, int k) const { return C[lidx(m, i, k)]; }
};

// Regression-backed backward induction:
//   Y_N = xi,  Y_k = max(L_k, E[Y_{k+1} | F_k])
// where the conditional expectation is the least-squares projection onto
// basis functions of the particle's own state at t_k. Scenarios are pooled
// across particles (the systems treated here are exchangeable).
//
// L: obstacle (m, i, k) for k < N.  xi: terminal values (m, i).
// state: feature surface (m, i, k), k = 0..N — the particle's own path.
ValueSurface snell_backward_mc(const std::vector<double>& L,
                               const std::vector<double>& xi,
                               const StateEnsemble& state,
                               const RegressionSpec& reg,
                               Exec exec = Exec::Parallel);

}  // namespace mfstop
