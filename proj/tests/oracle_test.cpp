#include <cmath>

#include <doctest.h>

#include "mfstop/oracle.hpp"

using namespace mfstop;

TEST_CASE("adapted rule counts per depth") {
  CHECK(enumerate_rules(1).size() == 2);
  CHECK(enumerate_rules(2).size() == 5);
  CHECK(enumerate_rules(3).size() == 26);
  CHECK_THROWS_AS(enumerate_rules(4), ConfigError);
}

TEST_CASE("enumerated rules are canonical and distinct") {
  const auto rules = enumerate_rules(3);
  for (std::size_t a = 0; a < rules.size(); ++a)
    for (std::size_t b = a + 1; b < rules.size(); ++b) {
      bool same = true;
      for (int p = 0; p < 8 && same; ++p)
        same = rules[a].stop_index(p) == rules[b].stop_index(p);
      CHECK_FALSE(same);
    }
  for (const auto& r : rules)
    for (int k = 0; k < 3; ++k)
      for (int b = 0; b < (1 << k); ++b)
        if (r.stops_at(k, b))
          for (int j = 0; j < k; ++j)
            CHECK_FALSE(r.stops_at(j, b & ((1 << j) - 1)));
}

TEST_CASE("constant obstacle versus constant terminal payoff") {
  ObstacleSpec spec;
  spec.name = "flat";
  spec.h = [](double, double) { return 0.6; };
  spec.xi = [](double) { return 0.2; };
  LatticeModel model;
  model.n = 1;
  model.N = 1;
  model.dt = 1.0;
  model.initials = {0.0};
  const auto sol = picard_interacting_lattice(spec, model);
  const auto res = brute_force_optimal(sol, spec, 0);
  CHECK(res.best == doctest::Approx(0.6).epsilon(1e-14));
  REQUIRE(res.rule_values.size() == 2);
  // one rule scores the obstacle, the other the terminal payoff
  const double lo = std::min(res.rule_values[0], res.rule_values[1]);
  const double hi = std::max(res.rule_values[0], res.rule_values[1]);
  CHECK(lo == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(hi == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(res.optimal_rule_ids.size() == 1);
}

TEST_CASE("stopped variance scored exactly on the tree") {
  ObstacleSpec spec;
  spec.name = "variance";
  spec.mode = ObstacleMode::StateDriven;
  spec.lipschitz_flag = false;
  spec.h = [](double x, double m) { return (x - m) * (x - m); };
  spec.xi = [](double w) { return w * w; };
  LatticeModel model;
  model.n = 1;
  model.N = 2;
  model.dt = 0.5;
  model.initials = {0.0};
  const auto V = lattice_state_trees(model);
  std::vector<TreeValues> xi(1);
  xi[0].assign(4, 0.0);
  for (int p = 0; p < 4; ++p) {
    const double w = model.state(0, 2, p);
    xi[0][static_cast<std::size_t>(p)] = w * w;
  }
  // deterministic-time rules recover Var X_{t_k} = t_k
  for (int k = 0; k <= 2; ++k) {
    const double v = exact_rule_value(model, V, xi, constant_rule(2, k), spec,
                                      RewardMode::MeanField, 0);
    CHECK(v == doctest::Approx(0.5 * k).epsilon(1e-14));
  }
  const auto res =
      brute_force_optimal(model, V, xi, spec, RewardMode::MeanField, 0);
  CHECK(res.best >= 1.0 - 1e-14);
}

TEST_CASE("hitting rule of a converged solve is oracle-optimal") {
  ObstacleSpec spec;
  spec.name = "linear";
  spec.gamma1 = 0.2;
  spec.h = [](double y, double) { return 0.2 * y + 0.3; };
  spec.xi = [](double w) { return w; };
  for (int N : {2, 3}) {
    LatticeModel model;
    model.n = 1;
    model.N = N;
    model.dt = 1.0 / N;
    model.initials = {0.0};
    const auto sol = picard_interacting_lattice(spec, model, 1e-12, 200);
    REQUIRE(sol.trace.converged);
    const auto res = brute_force_optimal(sol, spec, 0);
    const auto rule = hitting_rule_lattice(sol, 0);
    const double v = exact_rule_value(model, sol.Y, sol.xi, rule, spec,
                                      RewardMode::Interacting, 0);
    CHECK(std::fabs(v - res.best) <= 1e-12);
    CHECK(std::fabs(sol.Y[0][0] - res.best) <= 1e-12);
  }
}

TEST_CASE("two-particle interacting solve agrees with its oracle") {
  ObstacleSpec spec;
  spec.name = "pair";
  spec.gamma1 = 0.2;
  spec.gamma2 = 0.1;
  spec.h = [](double y, double z) { return 0.2 * y + 0.1 * z + 0.2; };
  spec.xi = [](double w) { return w; };
  LatticeModel model;
  model.n = 2;
  model.N = 2;
  model.dt = 0.5;
  model.initials = {0.1, -0.2};
  const auto sol = picard_interacting_lattice(spec, model, 1e-12, 200);
  REQUIRE(sol.trace.converged);
  for (int i = 0; i < 2; ++i) {
    const auto res = brute_force_optimal(sol, spec, i);
    CHECK(std::fabs(sol.Y[static_cast<std::size_t>(i)][0] - res.best) <=
          1e-12);
  }
}

TEST_CASE("time-consistency probe") {
  LatticeModel model;
  model.n = 1;
  model.N = 2;
  model.dt = 0.5;
  model.initials = {0.0};

  SUBCASE("vanishes without mean coupling") {
    ObstacleSpec plain;
    plain.name = "no-coupling";
    plain.gamma1 = 0.4;
    plain.h = [](double y, double) { return 0.4 * y; };
    plain.xi = [](double w) { return std::fabs(w); };
    const auto sol = picard_meanfield_lattice(plain, model);
    CHECK(bellman_probe(sol, plain, MeanStyle::RuleScalar) <= 1e-12);
    CHECK(bellman_probe(sol, plain, MeanStyle::FrozenMean) <= 1e-12);
  }

  SUBCASE("positive under the rule-level mean, zero when frozen") {
    ObstacleSpec coupled;
    coupled.name = "mean-coupled";
    coupled.gamma2 = 0.3;
    coupled.h = [](double, double z) { return 0.3 * z * z; };
    coupled.xi = [](double w) { return -w - 1.0; };
    coupled.lipschitz_flag = false;
    const auto sol = picard_meanfield_lattice(coupled, model, 1e-10, 200,
                                              PicardInit::FlatXi, true);
    REQUIRE(sol.trace.converged);
    // closed form for this instance: 0.3 * (3 + 2 sqrt 2) / 8
    const double expected = 0.3 * (3.0 + 2.0 * std::sqrt(2.0)) / 8.0;
    CHECK(bellman_probe(sol, coupled, MeanStyle::RuleScalar) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(bellman_probe(sol, coupled, MeanStyle::FrozenMean) <= 1e-12);
  }
}
