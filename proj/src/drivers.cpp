#include "mfstop/drivers.hpp"

#include <cmath>

#include "mfstop/errors.hpp"

namespace mfstop {

DriverEnsemble sample_drivers(const TimeGrid& grid, int n, int M,
                              std::uint64_t seed, Exec exec) {
  if (n < 1) throw ConfigError("sample_drivers: particle count must be >= 1");
  if (M < 1) throw ConfigError("sample_drivers: scenario count must be >= 1");
  DriverEnsemble ens;
  ens.grid = grid;
  ens.M = M;
  ens.n = n;
  ens.seed = seed;
  ens.dw.resize(static_cast<std::size_t>(M) * n * grid.N);
  const double sd = std::sqrt(grid.dt());
  const int N = grid.N;
  par_for(exec, static_cast<std::int64_t>(M) * n, [&](std::int64_t mi) {
    const int m = static_cast<int>(mi / n);
    const int i = static_cast<int>(mi % n);
    for (int k = 0; k < N; ++k) {
      ens.dw[ens.idx(m, i, k)] =
          sd * standard_normal(seed, static_cast<std::uint32_t>(m),
                               static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(k));
    }
  });
  return ens;
}

}  // namespace mfstop
