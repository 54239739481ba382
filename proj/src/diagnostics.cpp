#include "mfstop/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "mfstop/errors.hpp"
#include "mfstop/rng.hpp"

namespace mfstop {

namespace {

constexpr int kResamples = 200;

double plain_se(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (xs.size() - 1.0) / xs.size());
}

}  // namespace

EstimateWithSE s2_distance(const std::vector<double>& A,
                           const std::vector<double>& B, int M, int n, int K,
                           std::uint64_t seed, Exec exec) {
  const std::size_t cells = static_cast<std::size_t>(M) * n * K;
  if (A.size() != cells || B.size() != cells)
    throw ConfigError("s2_distance: surfaces are not on coupled drivers "
                      "(shape mismatch)");
  // Per-(scenario, particle) pathwise squared sup.
  std::vector<double> d(static_cast<std::size_t>(M) * n, 0.0);
  par_for(exec, static_cast<std::int64_t>(M) * n, [&](std::int64_t mi) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) {
      const double g = A[static_cast<std::size_t>(mi) * K + k] -
                       B[static_cast<std::size_t>(mi) * K + k];
      s = std::max(s, g * g);
    }
    d[static_cast<std::size_t>(mi)] = s;
  });

  auto sup_over_particles = [&](const std::vector<int>& rows) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      double e = 0.0;
      for (int m : rows) e += d[static_cast<std::size_t>(m) * n + i];
      best = std::max(best, e / rows.size());
    }
    return best;
  };

  std::vector<int> all(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) all[static_cast<std::size_t>(m)] = m;
  EstimateWithSE est;
  est.value = sup_over_particles(all);

  std::vector<double> boot(kResamples, 0.0);
  par_for(exec, kResamples, [&](std::int64_t r) {
    std::vector<int> rows(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m)
      rows[static_cast<std::size_t>(m)] = static_cast<int>(uniform_index(
          seed, 0xB007u, static_cast<std::uint32_t>(r),
          static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(M)));
    boot[static_cast<std::size_t>(r)] = sup_over_particles(rows);
  });
  double bm = 0.0;
  for (double v : boot) bm += v;
  bm /= kResamples;
  double ss = 0.0;
  for (double v : boot) ss += (v - bm) * (v - bm);
  est.se = std::sqrt(ss / (kResamples - 1.0));
  return est;
}

EstimateWithSE s2_distance(const ValueSurface& A, const ValueSurface& B,
                           std::uint64_t seed, Exec exec) {
  if (A.M != B.M || A.n != B.n || A.N != B.N)
    throw ConfigError("s2_distance: surfaces are not on coupled drivers");
  return s2_distance(A.Y, B.Y, A.M, A.n, A.N + 1, seed, exec);
}

EstimateWithSE tau_deviation_prob(const std::vector<int>& hit_n,
                                  const std::vector<int>& hit_ref, double dt,
                                  double eps) {
  if (eps <= 0.0 || eps < dt)
    throw ConfigError("tau_deviation_prob: eps below the grid resolution");
  if (hit_n.size() != hit_ref.size() || hit_n.empty())
    throw ConfigError("tau_deviation_prob: index vectors must be coupled");
  const double M = static_cast<double>(hit_n.size());
  double cnt = 0.0;
  for (std::size_t m = 0; m < hit_n.size(); ++m)
    if (std::fabs(hit_n[m] - hit_ref[m]) * dt > eps) cnt += 1.0;
  EstimateWithSE est;
  est.value = cnt / M;
  est.se = std::sqrt(est.value * (1.0 - est.value) / M);
  return est;
}

ExchangeabilityReport exchangeability_stat(
    const ValueSurface& values, const std::vector<double>& initials) {
  const int M = values.M, n = values.n;
  ExchangeabilityReport rep;
  for (double x0 : initials)
    if (x0 != initials[0]) rep.symmetric = false;
  rep.particle_means.resize(static_cast<std::size_t>(n));
  rep.particle_se.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<double> y0(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m)
      y0[static_cast<std::size_t>(m)] = values.y(m, i, 0);
    double mean = 0.0;
    for (double v : y0) mean += v;
    mean /= M;
    rep.particle_means[static_cast<std::size_t>(i)] = mean;
    rep.particle_se[static_cast<std::size_t>(i)] = plain_se(y0, mean);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double gap = std::fabs(rep.particle_means[static_cast<std::size_t>(i)] -
                                   rep.particle_means[static_cast<std::size_t>(j)]);
      const double s =
          std::sqrt(rep.particle_se[static_cast<std::size_t>(i)] *
                        rep.particle_se[static_cast<std::size_t>(i)] +
                    rep.particle_se[static_cast<std::size_t>(j)] *
                        rep.particle_se[static_cast<std::size_t>(j)]);
      const double stat = s > 0.0 ? gap / s : (gap > 0.0 ? 1e300 : 0.0);
      rep.stat = std::max(rep.stat, stat);
    }
  return rep;
}

LlnTable lln_gap(const CoefficientSpec& coef, double x0, const TimeGrid& grid,
                 const std::vector<int>& ns, int M,
                 const std::vector<double>& reference, std::uint64_t seed,
                 Exec exec) {
  if (ns.size() < 3)
    throw ConfigError("lln_gap: need at least 3 particle counts for the "
                      "slope fit");
  if (reference.size() != static_cast<std::size_t>(grid.N) + 1)
    throw ConfigError("lln_gap: reference mean has the wrong length");
  const int N = grid.N;
  const double dt = grid.dt(), sdt = std::sqrt(dt);
  LlnTable table;
  table.ns = ns;
  for (std::size_t q = 0; q < ns.size(); ++q) {
    const int n = ns[q];
    // Distinct streams per n-point.
    const std::uint64_t key = seed ^ (static_cast<std::uint64_t>(n) << 40);
    std::vector<double> sups(static_cast<std::size_t>(M));
    par_for(exec, M, [&](std::int64_t mm) {
      const int m = static_cast<int>(mm);
      std::vector<double> meanpath(static_cast<std::size_t>(N) + 1, 0.0);
      for (int i = 0; i < n; ++i) {
        double x = x0;
        meanpath[0] += x;
        for (int k = 0; k < N; ++k) {
          const double z = reference[static_cast<std::size_t>(k)];
          x += coef.b(k * dt, x, z) * dt +
               coef.sigma(k * dt, x, z) * sdt *
                   standard_normal(key, static_cast<std::uint32_t>(m),
                                   static_cast<std::uint32_t>(i),
                                   static_cast<std::uint32_t>(k));
          meanpath[static_cast<std::size_t>(k) + 1] += x;
        }
      }
      double s = 0.0;
      for (int k = 0; k <= N; ++k) {
        const double g = meanpath[static_cast<std::size_t>(k)] / n -
                         reference[static_cast<std::size_t>(k)];
        s = std::max(s, g * g);
      }
      sups[static_cast<std::size_t>(mm)] = s;
    });
    const double mean =
        det_sum(exec, M,
                [&](std::int64_t m) {
                  return sups[static_cast<std::size_t>(m)];
                }) /
        M;
    table.gap.push_back(mean);
    table.se.push_back(plain_se(sups, mean));
  }
  // Least-squares slope of log gap against log n.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double P = static_cast<double>(ns.size());
  for (std::size_t q = 0; q < ns.size(); ++q) {
    const double lx = std::log(static_cast<double>(ns[q]));
    const double ly = std::log(std::max(table.gap[q], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  table.slope = (P * sxy - sx * sy) / (P * sxx - sx * sx);
  return table;
}

EstimateWithSE variance_obstacle_gap(const StateEnsemble& states,
                                     std::uint64_t /*seed*/, Exec exec) {
  const int M = states.M, n = states.n, N = states.grid.N;
  if (n < 2) throw ConfigError("variance_obstacle_gap: need n >= 2");
  // Pooled cross-scenario moments per time node (particles are i.i.d.).
  std::vector<double> mu(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> var(static_cast<std::size_t>(N) + 1, 0.0);
  for (int k = 0; k <= N; ++k) {
    double s = 0.0, ss = 0.0;
    for (int m = 0; m < M; ++m)
      for (int i = 0; i < n; ++i) {
        const double x = states.at(m, i, k);
        s += x;
        ss += x * x;
      }
    const double cnt = static_cast<double>(M) * n;
    mu[static_cast<std::size_t>(k)] = s / cnt;
    var[static_cast<std::size_t>(k)] =
        std::max(0.0, ss / cnt - (s / cnt) * (s / cnt));
  }
  // E[(X^0 - Xbar)^2 | own path] for independent same-law particles:
  // ((1 - 1/n) X^0 - (n-1) mu / n)^2 + (n-1) var / n^2.
  std::vector<double> sups(static_cast<std::size_t>(M));
  par_for(exec, M, [&](std::int64_t mm) {
    const int m = static_cast<int>(mm);
    double s = 0.0;
    for (int k = 0; k <= N; ++k) {
      const double x = states.at(m, 0, k);
      const double mk = mu[static_cast<std::size_t>(k)];
      const double vk = var[static_cast<std::size_t>(k)];
      const double a = (1.0 - 1.0 / n) * x - (n - 1.0) * mk / n;
      const double cond = a * a + (n - 1.0) * vk / (static_cast<double>(n) * n);
      const double limit = (x - mk) * (x - mk);
      s = std::max(s, std::fabs(cond - limit));
    }
    sups[static_cast<std::size_t>(mm)] = s;
  });
  EstimateWithSE est;
  est.value = det_sum(exec, M,
                      [&](std::int64_t m) {
                        return sups[static_cast<std::size_t>(m)];
                      }) /
              M;
  est.se = plain_se(sups, est.value);
  return est;
}

bool trend_holds(const std::vector<EstimateWithSE>& xs) {
  for (std::size_t j = 1; j < xs.size(); ++j) {
    const double rise = xs[j].value - xs[j - 1].value;
    const double s = std::sqrt(xs[j - 1].se * xs[j - 1].se +
                               xs[j].se * xs[j].se);
    if (rise > 2.0 * s) return false;
  }
  return true;
}

bool decreasing_beyond_noise(const std::vector<EstimateWithSE>& xs) {
  for (std::size_t j = 1; j < xs.size(); ++j) {
    const double drop = xs[j - 1].value - xs[j].value;
    const double s = std::sqrt(xs[j - 1].se * xs[j - 1].se +
                               xs[j].se * xs[j].se);
    if (drop <= 2.0 * s) return false;
  }
  return true;
}

}  // namespace mfstop
