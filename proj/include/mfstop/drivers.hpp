#pragma once

#include <cstdint>
#include <vector>

#include "mfstop/exec.hpp"
#include "mfstop/rng.hpp"
#include "mfstop/time_grid.hpp"

namespace mfstop {

// Brownian increments dW[m][i][k] ~ N(0, T/N), one counter-based stream per
// (scenario, particle, step) cell. Regeneration with the same seed is
// bit-identical regardless of worker count.
struct DriverEnsemble {
  TimeGrid grid;
  int M = 0;  // scenarios
  int n = 0;  // particles
  std::uint64_t seed = 0;
  std::vector<double> dw;  // layout (m, i, k)

  std::size_t idx(int m, int i, int k) const {
    return (static_cast<std::size_t>(m) * n + i) * grid.N + k;
  }
  double at(int m, int i, int k) const { return dw[idx(m, i, k)]; }

  // Brownian path value at node k (sum of the first k increments).
  double path(int m, int i, int k) const {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += at(m, i, j);
    return s;
  }
};

DriverEnsemble sample_drivers(const TimeGrid& grid, int n, int M,
                              std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace mfstop
