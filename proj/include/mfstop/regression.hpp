#pragma once

#include <span>
#include <vector>

#include "mfstop/exec.hpp"

namespace mfstop {

// Cross-scenario least-squares estimator of conditional expectations.
// Basis: polynomial powers of the scalar feature up to `degree`, plus an
// optional extra feature column (the current value-process iterate).
struct RegressionSpec {
  int degree = 3;
  double ridge = -1.0;  // < 0: automatic 1e-8 * trace(Gram) / columns
  int min_scenarios = 8;
  bool include_extra_feature = false;
};

struct RegressionFit {
  std::vector<double> fitted;
  std::vector<double> coeffs;
  double residual_scale = 0.0;  // RMS residual
  double condition = 0.0;       // |max pivot| / |min pivot| of the Gram solve
};

RegressionFit fit_condexp(std::span<const double> samples,
                          std::span<const double> features,
                          std::span<const double> extra,  // may be empty
                          const RegressionSpec& reg, Exec exec = Exec::Parallel);

// Fitted values only (projection of `samples` onto the basis in `features`).
std::vector<double> estimate_condexp(std::span<const double> samples,
                                     std::span<const double> features,
                                     const RegressionSpec& reg,
                                     Exec exec = Exec::Parallel);

}  // namespace mfstop
