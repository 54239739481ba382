#include "mfstop/snell.hpp"

#include <cmath>

#include "mfstop/errors.hpp"

namespace mfstop {

ValueSurface snell_backward_mc(const std::vector<double>& L,
                               const std::vector<double>& xi,
                               const StateEnsemble& state,
                               const RegressionSpec& reg, Exec exec) {
  const int M = state.M, n = state.n, N = state.grid.N;
  ValueSurface vs;
  vs.M = M;
  vs.n = n;
  vs.N = N;
  vs.backend = "regression";
  if (L.size() != static_cast<std::size_t>(M) * n * N)
    throw ConfigError("snell_backward_mc: obstacle surface shape mismatch");
  if (xi.size() != static_cast<std::size_t>(M) * n)
    throw ConfigError("snell_backward_mc: terminal values shape mismatch");
  vs.L = L;
  vs.Y.resize(static_cast<std::size_t>(M) * n * (N + 1));
  vs.C.resize(static_cast<std::size_t>(M) * n * N);

  const std::int64_t cells = static_cast<std::int64_t>(M) * n;
  par_for(exec, cells, [&](std::int64_t mi) {
    const int m = static_cast<int>(mi / n);
    const int i = static_cast<int>(mi % n);
    vs.Y[vs.yidx(m, i, N)] = xi[static_cast<std::size_t>(m) * n + i];
  });

  std::vector<double> resp(static_cast<std::size_t>(cells));
  std::vector<double> feat(static_cast<std::size_t>(cells));
  for (int k = N - 1; k >= 0; --k) {
    par_for(exec, cells, [&](std::int64_t mi) {
      const int m = static_cast<int>(mi / n);
      const int i = static_cast<int>(mi % n);
      resp[static_cast<std::size_t>(mi)] = vs.y(m, i, k + 1);
      feat[static_cast<std::size_t>(mi)] = state.at(m, i, k);
    });
    RegressionSpec rk = reg;
    rk.include_extra_feature = false;
    const auto fit = fit_condexp(resp, feat, {}, rk, exec);
    vs.regression_noise = std::max(
        vs.regression_noise, fit.residual_scale * std::sqrt((reg.degree + 1.0) /
                                                            static_cast<double>(cells)));
    par_for(exec, cells, [&](std::int64_t mi) {
      const int m = static_cast<int>(mi / n);
      const int i = static_cast<int>(mi % n);
      const double cont = fit.fitted[static_cast<std::size_t>(mi)];
      vs.C[vs.lidx(m, i, k)] = cont;
      vs.Y[vs.yidx(m, i, k)] = std::max(vs.l(m, i, k), cont);
    });
  }
  return vs;
}

}  // namespace mfstop
