#include <cmath>

#include <doctest.h>

#include "mfstop/drivers.hpp"
#include "mfstop/picard.hpp"
#include "mfstop/stopping.hpp"

using namespace mfstop;

namespace {

// Small hand-filled surface: one scenario, one particle.
ValueSurface surface_from(const std::vector<double>& Y,
                          const std::vector<double>& L) {
  ValueSurface vs;
  vs.M = 1;
  vs.n = 1;
  vs.N = static_cast<int>(L.size());
  vs.Y = Y;
  vs.L = L;
  vs.C.assign(L.size(), 0.0);
  return vs;
}

}  // namespace

TEST_CASE("first-hit index from the gap process") {
  SUBCASE("stops immediately when the obstacle binds at time 0") {
    const auto vs = surface_from({1.0, 0.8, 0.5}, {1.0, 0.2});
    const auto rep = compute_z_and_hit(vs);
    CHECK(rep.hit(0, 0) == 0);
  }
  SUBCASE("never binding means stopping at the horizon") {
    const auto vs = surface_from({1.0, 0.8, 0.5}, {0.3, 0.2});
    const auto rep = compute_z_and_hit(vs);
    CHECK(rep.hit(0, 0) == 2);
  }
  SUBCASE("interior hit at the first coincidence") {
    const auto vs = surface_from({1.0, 0.8, 0.6, 0.5}, {0.5, 0.8, 0.1});
    const auto rep = compute_z_and_hit(vs);
    CHECK(rep.hit(0, 0) == 1);
    CHECK(rep.Z[0] == doctest::Approx(0.5));
    CHECK(rep.Z[1] == doctest::Approx(0.0));
  }
  SUBCASE("an explicit tolerance widens the band") {
    const auto vs = surface_from({1.0, 0.8, 0.5}, {0.95, 0.2});
    CHECK(compute_z_and_hit(vs).hit(0, 0) == 2);
    CHECK(compute_z_and_hit(vs, 0.1).hit(0, 0) == 0);
  }
}

TEST_CASE("noise floor of a regression surface enters the default band") {
  auto vs = surface_from({1.0, 0.8, 0.5}, {0.9999, 0.2});
  CHECK(compute_z_and_hit(vs).hit(0, 0) == 2);
  vs.regression_noise = 1e-4;
  CHECK(compute_z_and_hit(vs).hit(0, 0) == 0);
}

TEST_CASE("lattice hitting rule is canonical") {
  // uncoupled running obstacle that binds at the root: the rule says stop
  // at the root and must carry zeros everywhere below
  ObstacleSpec spec;
  spec.name = "bind-at-root";
  spec.h = [](double, double) { return 1.0; };
  spec.xi = [](double) { return 0.0; };
  LatticeModel model;
  model.n = 1;
  model.N = 2;
  model.dt = 0.5;
  model.initials = {0.0};
  const auto sol = picard_meanfield_lattice(spec, model);
  const auto rule = hitting_rule_lattice(sol);
  CHECK(rule.stops_at(0, 0));
  CHECK_FALSE(rule.stops_at(1, 0));
  CHECK_FALSE(rule.stops_at(1, 1));
  CHECK(rule.stop_index(0) == 0);
  CHECK(rule.stop_index(3) == 0);
}

TEST_CASE("stopping at the horizon scores the terminal payoff") {
  const int M = 64, n = 2, N = 3;
  std::vector<int> stops(static_cast<std::size_t>(M) * n, N);
  std::vector<double> V(static_cast<std::size_t>(M) * n * (N + 1), 0.0);
  std::vector<double> xi(static_cast<std::size_t>(M) * n);
  double acc = 0.0;
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < n; ++i) {
      const double v = 0.01 * (m * n + i);
      xi[static_cast<std::size_t>(m) * n + i] = v;
      if (i == 0) acc += v;
    }
  ObstacleSpec spec;
  spec.h = [](double, double) { return -100.0; };
  spec.xi = [](double w) { return w; };
  const auto est = evaluate_rule_mc(stops, V, xi, M, n, N, spec,
                                    RewardMode::Interacting, 0);
  CHECK(est.value == doctest::Approx(acc / M).epsilon(1e-13));
}

TEST_CASE("deterministic rule under the scalar mean coupling") {
  // stop everyone at time 0 with V(0) = 0.7: the cross-scenario mean is
  // 0.7, and h = z reproduces it with zero scatter
  const int M = 50, n = 1, N = 2;
  std::vector<int> stops(static_cast<std::size_t>(M), 0);
  std::vector<double> V(static_cast<std::size_t>(M) * (N + 1), 0.0);
  for (int m = 0; m < M; ++m) V[static_cast<std::size_t>(m) * (N + 1)] = 0.7;
  const std::vector<double> xi(static_cast<std::size_t>(M), 9.0);
  ObstacleSpec spec;
  spec.h = [](double, double z) { return z; };
  spec.xi = [](double w) { return w; };
  const auto est =
      evaluate_rule_mc(stops, V, xi, M, n, N, spec, RewardMode::MeanField, 0);
  CHECK(est.value == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(est.se == doctest::Approx(0.0));
}

TEST_CASE("stopped variance of a Brownian path matches t_k") {
  const int M = 20000, n = 1, N = 4;
  const TimeGrid g = make_time_grid(1.0, N);
  const DriverEnsemble d = sample_drivers(g, n, M, 91);
  std::vector<double> V(static_cast<std::size_t>(M) * (N + 1));
  for (int m = 0; m < M; ++m)
    for (int k = 0; k <= N; ++k)
      V[static_cast<std::size_t>(m) * (N + 1) + k] = d.path(m, 0, k);
  const std::vector<double> xi(static_cast<std::size_t>(M), 0.0);
  ObstacleSpec spec;
  spec.h = [](double x, double mu) { return (x - mu) * (x - mu); };
  spec.xi = [](double) { return 0.0; };
  for (int k = 1; k < N; ++k) {
    std::vector<int> stops(static_cast<std::size_t>(M), k);
    const auto est = evaluate_rule_mc(stops, V, xi, M, n, N, spec,
                                      RewardMode::MeanField, 0);
    CHECK(std::fabs(est.value - g.node(k)) <= 4.0 * est.se + 1e-12);
  }
}

TEST_CASE("without mean dependence the two reward modes coincide") {
  const int M = 200, n = 3, N = 2;
  const TimeGrid g = make_time_grid(1.0, N);
  const DriverEnsemble d = sample_drivers(g, n, M, 17);
  std::vector<double> V(static_cast<std::size_t>(M) * n * (N + 1));
  std::vector<double> xi(static_cast<std::size_t>(M) * n);
  std::vector<int> stops(static_cast<std::size_t>(M) * n);
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k <= N; ++k)
        V[(static_cast<std::size_t>(m) * n + i) * (N + 1) + k] =
            d.path(m, i, k);
      xi[static_cast<std::size_t>(m) * n + i] = d.path(m, i, N);
      stops[static_cast<std::size_t>(m) * n + i] = (m + i) % (N + 1);
    }
  ObstacleSpec spec;
  spec.h = [](double x, double) { return std::max(x, 0.0); };
  spec.xi = [](double w) { return w; };
  const auto a =
      evaluate_rule_mc(stops, V, xi, M, n, N, spec, RewardMode::Interacting, 1);
  const auto b =
      evaluate_rule_mc(stops, V, xi, M, n, N, spec, RewardMode::MeanField, 1);
  CHECK(a.value == b.value);
  CHECK(a.se == b.se);
}
