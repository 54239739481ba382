#pragma once

#include <vector>

#include "mfstop/errors.hpp"

namespace mfstop {

// Uniform grid 0 = t_0 < t_1 < ... < t_N = T. Stopping is restricted to
// grid nodes (Bermudan approximation of continuous stopping), so N controls
// the low bias of every value estimate downstream.
struct TimeGrid {
  double T = 1.0;
  int N = 1;

  double dt() const { return T / N; }
  double node(int k) const { return k * T / N; }
  std::vector<double> nodes() const {
    std::vector<double> v(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) v[static_cast<std::size_t>(k)] = node(k);
    return v;
  }
};

inline TimeGrid make_time_grid(double T, int N) {
  if (!(T > 0.0)) throw ConfigError("time grid: horizon T must be positive");
  if (N < 1) throw ConfigError("time grid: step count N must be >= 1");
  return TimeGrid{T, N};
}

}  // namespace mfstop
