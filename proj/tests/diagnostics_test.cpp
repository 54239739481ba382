#include <cmath>

#include <doctest.h>

#include "mfstop/diagnostics.hpp"
#include "mfstop/rng.hpp"

using namespace mfstop;

TEST_CASE("pathwise square distance between surfaces") {
  const int M = 40, n = 2, K = 3;
  std::vector<double> A(static_cast<std::size_t>(M) * n * K);
  for (std::size_t j = 0; j < A.size(); ++j) A[j] = 0.1 * (j % 17);

  SUBCASE("a surface is at distance zero from itself") {
    const auto d = s2_distance(A, A, M, n, K, 5);
    CHECK(d.value == 0.0);
    CHECK(d.se == 0.0);
  }
  SUBCASE("a uniform offset is squared exactly") {
    std::vector<double> B = A;
    for (double& v : B) v += 0.1;
    const auto d = s2_distance(A, B, M, n, K, 5);
    CHECK(d.value == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(d.se <= 1e-12);
  }
  SUBCASE("the sup over time picks the worst node") {
    std::vector<double> B = A;
    // bump one time node of every scenario for particle 1 only
    for (int m = 0; m < M; ++m) B[(static_cast<std::size_t>(m) * n + 1) * K + 2] += 0.3;
    const auto d = s2_distance(A, B, M, n, K, 5);
    CHECK(d.value == doctest::Approx(0.09).epsilon(1e-12));
  }
  SUBCASE("shape mismatch is rejected") {
    std::vector<double> B(A.size() + 1, 0.0);
    CHECK_THROWS_AS(s2_distance(A, B, M, n, K, 5), ConfigError);
  }
}

TEST_CASE("hitting-index deviation probability") {
  const double dt = 0.25;
  const std::vector<int> ref = {0, 1, 2, 3, 4, 0, 1, 2};

  SUBCASE("identical indices never deviate") {
    const auto d = tau_deviation_prob(ref, ref, dt, 2.0 * dt);
    CHECK(d.value == 0.0);
  }
  SUBCASE("a one-step shift stays inside a wide band") {
    std::vector<int> shifted = ref;
    for (int& k : shifted) k += 1;
    CHECK(tau_deviation_prob(shifted, ref, dt, 1.5 * dt).value == 0.0);
    // a two-step shift leaves the same band in every scenario
    for (int& k : shifted) k += 1;
    CHECK(tau_deviation_prob(shifted, ref, dt, 1.5 * dt).value == 1.0);
  }
  SUBCASE("mixed case with binomial scatter") {
    std::vector<int> half = ref;
    for (std::size_t m = 0; m < half.size(); m += 2) half[m] += 2;
    const auto d = tau_deviation_prob(half, ref, dt, 1.5 * dt);
    CHECK(d.value == doctest::Approx(0.5));
    CHECK(d.se == doctest::Approx(std::sqrt(0.25 / 8.0)).epsilon(1e-12));
  }
  SUBCASE("shape and band validation") {
    CHECK_THROWS_AS(tau_deviation_prob({0, 1}, {0}, dt, dt), ConfigError);
    CHECK_THROWS_AS(tau_deviation_prob(ref, ref, dt, -1.0), ConfigError);
  }
}

TEST_CASE("particle-symmetry statistic") {
  const int M = 400, n = 3, N = 2;
  ValueSurface vs;
  vs.M = M;
  vs.n = n;
  vs.N = N;
  vs.Y.assign(static_cast<std::size_t>(M) * n * (N + 1), 0.0);
  vs.L.assign(static_cast<std::size_t>(M) * n * N, 0.0);
  vs.C = vs.L;
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < n; ++i)
      vs.Y[vs.yidx(m, i, 0)] = standard_normal(3, 0, m, i);

  SUBCASE("exchangeable draws pass") {
    const auto rep = exchangeability_stat(vs, {0.5, 0.5, 0.5});
    CHECK(rep.symmetric);
    CHECK(rep.stat < 4.0);
    CHECK(rep.particle_means.size() == 3);
  }
  SUBCASE("a biased particle is flagged by the statistic") {
    for (int m = 0; m < M; ++m) vs.Y[vs.yidx(m, 2, 0)] += 1.0;
    const auto rep = exchangeability_stat(vs, {0.5, 0.5, 0.5});
    CHECK(rep.stat > 4.0);
  }
  SUBCASE("asymmetric initials only set the flag") {
    const auto rep = exchangeability_stat(vs, {0.5, 0.5, 0.7});
    CHECK_FALSE(rep.symmetric);
  }
}

TEST_CASE("empirical-mean gap across system sizes") {
  const TimeGrid g = make_time_grid(1.0, 1);
  const auto coef = make_coefficients("driftless");

  SUBCASE("slope fit needs at least three sizes") {
    CHECK_THROWS_AS(lln_gap(coef, 0.0, g, {2, 4}, 100, {0.0, 0.0}, 3),
                    ConfigError);
  }
  SUBCASE("independent normals average down at rate 1/n") {
    // one step of the driftless dynamics: the time-1 empirical mean of n
    // standard normals, squared gap E = 1/n
    const auto tab = lln_gap(coef, 0.0, g, {4, 16, 64}, 4000, {0.0, 0.0}, 3);
    REQUIRE(tab.gap.size() == 3);
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::fabs(tab.gap[j] - 1.0 / tab.ns[j]) <= 4.0 * tab.se[j]);
    CHECK(tab.slope == doctest::Approx(-1.0).epsilon(0.15));
  }
}

TEST_CASE("finite-system variance obstacle approaches its limit") {
  const TimeGrid g = make_time_grid(1.0, 4);
  const auto coef = make_coefficients("driftless");
  InitialSequenceRule rule;  // delta 0: independent copies from the same x
  std::vector<double> gaps;
  for (int n : {2, 8, 32}) {
    const DriverEnsemble d = sample_drivers(g, n, 2000, 19);
    const auto states = simulate_markov_family(d, coef, 0.0, rule);
    const auto gap = variance_obstacle_gap(states, 19);
    CHECK(gap.value >= 0.0);
    gaps.push_back(gap.value);
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
  DriverEnsemble d1 = sample_drivers(g, 1, 100, 19);
  const auto one = simulate_markov_family(d1, coef, 0.0, rule);
  CHECK_THROWS_AS(variance_obstacle_gap(one, 19), ConfigError);
}

TEST_CASE("trend classification with error bars") {
  auto pt = [](double v, double se) { return EstimateWithSE{v, se}; };
  const std::vector<EstimateWithSE> clean = {pt(1.0, 0.01), pt(0.5, 0.01),
                                             pt(0.25, 0.01)};
  CHECK(decreasing_beyond_noise(clean));
  CHECK(trend_holds(clean));

  // a drop within noise fails the strict check but not the lenient one
  const std::vector<EstimateWithSE> shallow = {pt(1.0, 0.2), pt(0.9, 0.2),
                                               pt(0.85, 0.2)};
  CHECK_FALSE(decreasing_beyond_noise(shallow));
  CHECK(trend_holds(shallow));

  // a rise beyond noise fails both
  const std::vector<EstimateWithSE> rising = {pt(1.0, 0.01), pt(1.5, 0.01)};
  CHECK_FALSE(decreasing_beyond_noise(rising));
  CHECK_FALSE(trend_holds(rising));
}
