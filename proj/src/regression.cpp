#include "mfstop/regression.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "mfstop/errors.hpp"

namespace mfstop {

namespace {

// Solves A x = b in place (A is p x p, row-major) by Gaussian elimination
// with partial pivoting. Returns |max pivot| / |min pivot|.
double solve_inplace(std::vector<double>& A, std::vector<double>& b, int p) {
  double pmax = 0.0, pmin = 0.0;
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int r = c + 1; r < p; ++r)
      if (std::fabs(A[r * p + c]) > std::fabs(A[piv * p + c])) piv = r;
    if (piv != c) {
      for (int j = 0; j < p; ++j) std::swap(A[c * p + j], A[piv * p + j]);
      std::swap(b[c], b[piv]);
    }
    const double d = A[c * p + c];
    const double ad = std::fabs(d);
    pmax = std::max(pmax, ad);
    pmin = (c == 0) ? ad : std::min(pmin, ad);
    if (ad < 1e-300)
      throw ConditioningError(
          "regression design is rank-deficient; set ridge > 0");
    for (int r = c + 1; r < p; ++r) {
      const double f = A[r * p + c] / d;
      if (f == 0.0) continue;
      for (int j = c; j < p; ++j) A[r * p + j] -= f * A[c * p + j];
      b[r] -= f * b[c];
    }
  }
  for (int c = p - 1; c >= 0; --c) {
    double s = b[c];
    for (int j = c + 1; j < p; ++j) s -= A[c * p + j] * b[j];
    b[c] = s / A[c * p + c];
  }
  return pmin > 0.0 ? pmax / pmin : std::numeric_limits<double>::infinity();
}

}  // namespace

RegressionFit fit_condexp(std::span<const double> samples,
                          std::span<const double> features,
                          std::span<const double> extra,
                          const RegressionSpec& reg, Exec exec) {
  const std::int64_t M = static_cast<std::int64_t>(samples.size());
  if (features.size() != samples.size())
    throw ConfigError("fit_condexp: samples/features size mismatch");
  if (reg.degree < 0) throw ConfigError("fit_condexp: degree must be >= 0");
  if (M < reg.min_scenarios)
    throw ConfigError("fit_condexp: fewer scenarios than min_scenarios");
  const bool use_extra = reg.include_extra_feature && !extra.empty();
  if (use_extra && extra.size() != samples.size())
    throw ConfigError("fit_condexp: extra feature size mismatch");
  const int p = reg.degree + 1 + (use_extra ? 1 : 0);

  auto basis = [&](std::int64_t m, int j) -> double {
    if (j <= reg.degree) {
      double v = 1.0;
      const double x = features[static_cast<std::size_t>(m)];
      for (int q = 0; q < j; ++q) v *= x;
      return v;
    }
    return extra[static_cast<std::size_t>(m)];
  };

  // Normal equations with deterministic chunked accumulation.
  std::vector<double> G(static_cast<std::size_t>(p) * p);
  std::vector<double> rhs(static_cast<std::size_t>(p));
  for (int a = 0; a < p; ++a) {
    for (int c = a; c < p; ++c) {
      const double s = det_sum(
          exec, M, [&](std::int64_t m) { return basis(m, a) * basis(m, c); });
      G[a * p + c] = s;
      G[c * p + a] = s;
    }
    rhs[static_cast<std::size_t>(a)] = det_sum(exec, M, [&](std::int64_t m) {
      return basis(m, a) * samples[static_cast<std::size_t>(m)];
    });
  }
  double trace = 0.0;
  for (int a = 0; a < p; ++a) trace += G[a * p + a];
  const double ridge = reg.ridge < 0.0 ? 1e-8 * trace / p : reg.ridge;
  for (int a = 0; a < p; ++a) G[a * p + a] += ridge;

  RegressionFit fit;
  fit.coeffs = rhs;
  fit.condition = solve_inplace(G, fit.coeffs, p);

  fit.fitted.resize(static_cast<std::size_t>(M));
  par_for(exec, M, [&](std::int64_t m) {
    double v = 0.0;
    for (int j = 0; j < p; ++j)
      v += fit.coeffs[static_cast<std::size_t>(j)] * basis(m, j);
    fit.fitted[static_cast<std::size_t>(m)] = v;
  });
  const double ss = det_sum(exec, M, [&](std::int64_t m) {
    const double r =
        samples[static_cast<std::size_t>(m)] - fit.fitted[static_cast<std::size_t>(m)];
    return r * r;
  });
  fit.residual_scale = std::sqrt(ss / static_cast<double>(M));
  return fit;
}

std::vector<double> estimate_condexp(std::span<const double> samples,
                                     std::span<const double> features,
                                     const RegressionSpec& reg, Exec exec) {
  return fit_condexp(samples, features, {}, reg, exec).fitted;
}

}  // namespace mfstop
