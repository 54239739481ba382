#include "mfstop/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mfstop/diagnostics.hpp"
#include "mfstop/errors.hpp"
#include "mfstop/lattice.hpp"
#include "mfstop/oracle.hpp"
#include "mfstop/picard.hpp"
#include "mfstop/presets.hpp"
#include "mfstop/rng.hpp"
#include "mfstop/sde.hpp"
#include "mfstop/snell.hpp"
#include "mfstop/stopping.hpp"

namespace mfstop {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double urand(std::uint64_t seed, std::uint32_t a, std::uint32_t b,
             std::uint32_t c) {
  const auto x = philox::block(seed, {a, b, c, 0x0ddu});
  return uniform_from_bits(x[0], x[1]);
}

struct Bundle {
  std::filesystem::path dir;
  std::vector<std::string> lines;
  bool ok = true;

  void check(bool pass, const std::string& what) {
    lines.push_back(std::string(pass ? "[PASS] " : "[FAIL] ") + what);
    if (!pass) ok = false;
  }
  void info(const std::string& what) { lines.push_back("[INFO] " + what); }
};

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

json config_echo(const ExperimentConfig& c) {
  return json{{"kind", c.kind},       {"preset", c.preset_name},
              {"seed", c.seed},       {"T", c.T},
              {"N", c.N},             {"M", c.M},
              {"n_grid", c.n_grid},   {"eps", c.eps},
              {"x", c.x},             {"c_starts", c.c_starts},
              {"out", c.out_dir}};
}

// ---------------------------------------------------------------------------

void run_oracle_suite(const ExperimentConfig& cfg, Bundle& b) {
  std::string csv =
      "instance,n,N,mode,gamma1,gamma2,snell_root,oracle_best,hit_value,"
      "snell_vs_oracle,hit_vs_oracle\n";
  json oracle_json = json::array();
  double worst_snell = 0.0, worst_hit = 0.0;
  const int instances = 24;
  for (int t = 0; t < instances; ++t) {
    const int n = 1 + static_cast<int>(urand(cfg.seed, 1, t, 0) * 2.0);
    const int N = 2 + static_cast<int>(urand(cfg.seed, 2, t, 0) * 2.0);
    const bool state_driven = t % 3 == 2;
    const bool standard = t % 2 == 0;  // no mean coupling
    LatticeModel model;
    model.n = n;
    model.N = N;
    model.dt = cfg.T / N;
    for (int i = 0; i < n; ++i)
      model.initials.push_back(2.0 * urand(cfg.seed, 3, t, i) - 1.0);

    ObstacleSpec spec;
    const double g1 = 0.1 + 0.4 * urand(cfg.seed, 4, t, 0);
    const double g2 = standard ? 0.0 : 0.1 + 0.2 * urand(cfg.seed, 5, t, 0);
    spec.gamma1 = g1;
    spec.gamma2 = g2;
    if (state_driven) {
      spec.name = "call";
      spec.mode = ObstacleMode::StateDriven;
      spec.h = [](double x, double) { return std::max(x, 0.0); };
      spec.xi = [](double w) { return std::max(w, 0.0); };
    } else {
      spec.name = "linear";
      spec.h = [g1, g2](double y, double z) { return g1 * y + g2 * z; };
      spec.xi = [](double w) { return std::fabs(w); };
    }

    LatticeSolution sol = picard_interacting_lattice(spec, model);
    const int particle = 0;
    OracleResult oracle = brute_force_optimal(sol, spec, particle);
    const double root = sol.Y[0][0];
    const double hit_value = exact_rule_value(
        model,
        spec.mode == ObstacleMode::Recursive ? sol.Y
                                             : lattice_state_trees(model),
        sol.xi, hitting_rule_lattice(sol, particle), spec,
        RewardMode::Interacting, particle);
    const double ds = std::fabs(root - oracle.best);
    const double dh = std::fabs(hit_value - oracle.best);
    if (standard && g2 == 0.0) worst_snell = std::max(worst_snell, ds);
    worst_hit = std::max(worst_hit, dh);
    csv += std::to_string(t) + "," + std::to_string(n) + "," +
           std::to_string(N) + "," +
           (state_driven ? "state-driven" : "recursive") + "," + fmt(g1) +
           "," + fmt(g2) + "," + fmt(root) + "," + fmt(oracle.best) + "," +
           fmt(hit_value) + "," + fmt(ds) + "," + fmt(dh) + "\n";
    oracle_json.push_back(json{{"instance", t},
                               {"best", oracle.best},
                               {"rule_values", oracle.rule_values},
                               {"optimal_rule_ids", oracle.optimal_rule_ids}});
  }
  write_text(b.dir / "table.csv", csv);
  write_text(b.dir / "oracle.json", oracle_json.dump(2) + "\n");
  b.check(worst_snell <= 1e-12,
          "Snell=bruteforce on standard instances, worst gap " +
              fmt(worst_snell));
  b.check(worst_hit <= 1e-12,
          "hitting rule attains the oracle maximum, worst gap " +
              fmt(worst_hit));
}

// ---------------------------------------------------------------------------

void run_recursive_converge(const ExperimentConfig& cfg, Bundle& b) {
  ProblemPreset preset = find_preset(
      cfg.preset_name.empty() ? "recursive-linear" : cfg.preset_name);
  const TimeGrid grid = make_time_grid(cfg.T, cfg.N);
  const double eps = cfg.eps > 0.0 ? cfg.eps : 2.0 * grid.dt();
  std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{4, 16, 64}
                                           : cfg.n_grid;
  RegressionSpec reg;
  std::string csv = "n,s2,s2_se,tau_dev,tau_dev_se,reward_gap,reward_gap_se\n";
  std::vector<EstimateWithSE> s2s, taus, gaps;
  for (int n : ns) {
    DriverEnsemble drivers =
        sample_drivers(grid, n, cfg.M, cfg.seed, cfg.exec);
    McSolution sys = picard_interacting_mc(preset.obstacle, drivers, reg,
                                           1e-4, 50, false, cfg.exec);
    McMeanfieldSolution ref = picard_meanfield_mc(preset.obstacle, drivers,
                                                  reg, 1e-4, 50, false,
                                                  cfg.exec);
    const EstimateWithSE s2 =
        s2_distance(sys.values, ref.values, cfg.seed ^ n, cfg.exec);
    StoppingReport rep_n = compute_z_and_hit(sys.values, -1.0, cfg.exec);
    StoppingReport rep_r = compute_z_and_hit(ref.values, -1.0, cfg.exec);
    const EstimateWithSE tau =
        tau_deviation_prob(rep_n.hit_index, rep_r.hit_index, grid.dt(), eps);
    const RewardEstimate ev_n = evaluate_rule_mc(
        rep_n.hit_index, sys.values.Y, sys.xi, cfg.M, n, cfg.N,
        preset.obstacle, RewardMode::Interacting, 0, cfg.exec);
    const RewardEstimate ev_r = evaluate_rule_mc(
        rep_r.hit_index, ref.values.Y, ref.xi, cfg.M, n, cfg.N,
        preset.obstacle, RewardMode::MeanField, 0, cfg.exec);
    EstimateWithSE gap;
    gap.value = std::fabs(ev_n.value - ev_r.value);
    gap.se = std::sqrt(ev_n.se * ev_n.se + ev_r.se * ev_r.se);
    s2s.push_back(s2);
    taus.push_back(tau);
    gaps.push_back(gap);
    csv += std::to_string(n) + "," + fmt(s2.value) + "," + fmt(s2.se) + "," +
           fmt(tau.value) + "," + fmt(tau.se) + "," + fmt(gap.value) + "," +
           fmt(gap.se) + "\n";
  }
  write_text(b.dir / "table.csv", csv);
  b.check(decreasing_beyond_noise(s2s), "pathwise squared distance drops "
                                        "beyond 2 SE at every n step");
  b.check(trend_holds(taus) && taus.back().value <= 0.15,
          "hitting-time deviation probability decreasing, final " +
              fmt(taus.back().value));
  b.check(trend_holds(gaps) && gaps.back().value <= 3.0 * gaps.back().se,
          "reward gap to the limit rule decreasing, final " +
              fmt(gaps.back().value) + " (3 SE = " +
              fmt(3.0 * gaps.back().se) + ")");
}

// ---------------------------------------------------------------------------

void run_sde_converge(const ExperimentConfig& cfg, Bundle& b) {
  const TimeGrid grid = make_time_grid(cfg.T, cfg.N);
  CoefficientSpec coef = make_coefficients("mf-attract", 1.0, 1.0);
  std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{4, 16, 64}
                                           : cfg.n_grid;
  std::string csv = "n,s2,s2_se\n";
  std::vector<EstimateWithSE> s2s;
  for (int n : ns) {
    DriverEnsemble drivers =
        sample_drivers(grid, n, cfg.M, cfg.seed, cfg.exec);
    std::vector<double> initials(static_cast<std::size_t>(n), cfg.x);
    StateEnsemble sys = simulate_interacting(drivers, coef, initials,
                                             cfg.exec);
    auto [ref, mean] =
        simulate_mckean_vlasov(drivers, coef, cfg.x, 1e-8, 50, cfg.exec);
    const EstimateWithSE s2 = s2_distance(sys.X, ref.X, cfg.M, n,
                                          cfg.N + 1, cfg.seed ^ n, cfg.exec);
    s2s.push_back(s2);
    csv += std::to_string(n) + "," + fmt(s2.value) + "," + fmt(s2.se) + "\n";
  }
  write_text(b.dir / "table.csv", csv);
  b.check(decreasing_beyond_noise(s2s),
          "state-path squared distance drops beyond 2 SE at every n step");

  std::vector<int> lln_ns = {8, 16, 32, 64, 128, 256, 512};
  std::vector<double> reference(static_cast<std::size_t>(cfg.N) + 1, cfg.x);
  LlnTable lln = lln_gap(make_coefficients("driftless"), cfg.x, grid, lln_ns,
                         cfg.M, reference, cfg.seed + 7, cfg.exec);
  std::string lln_csv = "n,gap,se\n";
  for (std::size_t q = 0; q < lln.ns.size(); ++q)
    lln_csv += std::to_string(lln.ns[q]) + "," + fmt(lln.gap[q]) + "," +
               fmt(lln.se[q]) + "\n";
  write_text(b.dir / "lln.csv", lln_csv);
  b.check(std::fabs(lln.slope + 1.0) <= 0.3,
          "empirical-mean gap slope " + fmt(lln.slope) + " within -1 +- 0.3");
}

// ---------------------------------------------------------------------------

void run_variance_demo(const ExperimentConfig& cfg, Bundle& b) {
  ProblemPreset preset =
      find_preset(cfg.preset_name.empty() ? "variance" : cfg.preset_name);
  const TimeGrid grid = make_time_grid(cfg.T, cfg.N);
  std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{8, 32, 128}
                                           : cfg.n_grid;
  std::string csv = "n,obstacle_gap,se\n";
  std::vector<EstimateWithSE> gaps;
  InitialSequenceRule rule;
  rule.delta = 0.0;
  for (int n : ns) {
    DriverEnsemble drivers =
        sample_drivers(grid, n, cfg.M, cfg.seed, cfg.exec);
    StateEnsemble states = simulate_markov_family(
        drivers, preset.coefficients, cfg.x, rule, cfg.exec);
    const EstimateWithSE gap =
        variance_obstacle_gap(states, cfg.seed ^ n, cfg.exec);
    gaps.push_back(gap);
    csv += std::to_string(n) + "," + fmt(gap.value) + "," + fmt(gap.se) + "\n";
  }
  write_text(b.dir / "table.csv", csv);
  b.check(decreasing_beyond_noise(gaps),
          "conditional-variance obstacle gap drops beyond 2 SE per n step");
}

// ---------------------------------------------------------------------------

void run_markov_demo(const ExperimentConfig& cfg, Bundle& b) {
  ProblemPreset preset = find_preset(
      cfg.preset_name.empty() ? "markov-variance" : cfg.preset_name);
  const TimeGrid grid = make_time_grid(cfg.T, cfg.N);
  const int n = cfg.n_grid.empty() ? 32 : cfg.n_grid.back();
  InitialSequenceRule rule;
  rule.delta = preset.delta;
  DriverEnsemble drivers = sample_drivers(grid, n, cfg.M, cfg.seed, cfg.exec);
  StateEnsemble states = simulate_markov_family(
      drivers, preset.coefficients, cfg.x, rule, cfg.exec);
  RegressionSpec reg;
  McSolution sol = solve_statedriven_interacting_mc(preset.obstacle, states,
                                                    reg, cfg.exec);
  StoppingReport rep = compute_z_and_hit(sol.values, -1.0, cfg.exec);
  RewardEstimate pipeline = evaluate_rule_mc(
      rep.hit_index, states.X, sol.xi, cfg.M, n, cfg.N, preset.obstacle,
      RewardMode::Interacting, 0, cfg.exec);

  // Centered auxiliary problem: match c, then score its hitting rule on
  // the same drivers through the same reward functional. Exploratory
  // cross-check; the two constructions live on different horizons in the
  // source literature.
  CMatchResult cm =
      pedersen_c_match(preset, cfg.x, grid, cfg.M, cfg.seed + 1, cfg.x,
                       CMatchBackend::MonteCarlo, 1e-3, 60, 0.5, cfg.exec);
  std::vector<double> L(static_cast<std::size_t>(cfg.M) * n * cfg.N);
  std::vector<double> cxi(static_cast<std::size_t>(cfg.M) * n);
  for (int m = 0; m < cfg.M; ++m)
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < cfg.N; ++k) {
        const double d = states.at(m, i, k) - cm.c_star;
        L[(static_cast<std::size_t>(m) * n + i) * cfg.N + k] = d * d;
      }
      const double d = states.at(m, i, cfg.N) - cm.c_star;
      cxi[static_cast<std::size_t>(m) * n + i] = d * d;
    }
  ValueSurface cvs = snell_backward_mc(L, cxi, states, reg, cfg.exec);
  StoppingReport crep = compute_z_and_hit(cvs, -1.0, cfg.exec);
  RewardEstimate matched = evaluate_rule_mc(
      crep.hit_index, states.X, sol.xi, cfg.M, n, cfg.N, preset.obstacle,
      RewardMode::Interacting, 0, cfg.exec);

  std::string csv = "quantity,value,se\n";
  csv += "pipeline_reward," + fmt(pipeline.value) + "," + fmt(pipeline.se) +
         "\n";
  csv += "c_matched_reward," + fmt(matched.value) + "," + fmt(matched.se) +
         "\n";
  csv += "c_star," + fmt(cm.c_star) + "," + fmt(cm.se) + "\n";
  write_text(b.dir / "table.csv", csv);
  b.info("exploratory cross-check: the centered construction is "
         "transplanted to a finite horizon");
  const double tol =
      std::max(0.05, 4.0 * (pipeline.se + matched.se));
  b.check(std::fabs(pipeline.value - matched.value) <= tol,
          "hitting-rule reward " + fmt(pipeline.value) +
              " matches c-matched rule reward " + fmt(matched.value) +
              " within " + fmt(tol));
}

// ---------------------------------------------------------------------------

void run_pedersen_match(const ExperimentConfig& cfg, Bundle& b) {
  ProblemPreset preset = find_preset(
      cfg.preset_name.empty() ? "markov-variance" : cfg.preset_name);
  const TimeGrid grid = make_time_grid(cfg.T, cfg.N);
  std::vector<double> starts = cfg.c_starts;
  if (starts.empty()) starts = {cfg.x - 1.0, cfg.x, cfg.x + 1.0};
  const bool martingale = preset.coefficients.name == "driftless";

  std::string csv = "backend,c0,c_star,residual,se,iterations\n";
  double worst_lattice = 0.0, worst_mc = 0.0, mc_se = 0.0;
  for (double c0 : starts) {
    CMatchResult lat =
        pedersen_c_match(preset, cfg.x, grid, cfg.M, cfg.seed, c0,
                         CMatchBackend::Lattice, 1e-12, 80, 0.5, cfg.exec);
    csv += "lattice," + fmt(c0) + "," + fmt(lat.c_star) + "," +
           fmt(lat.residual) + ",0," + std::to_string(lat.iterations) + "\n";
    worst_lattice = std::max(worst_lattice, std::fabs(lat.c_star - cfg.x));
    CMatchResult mc =
        pedersen_c_match(preset, cfg.x, grid, cfg.M, cfg.seed, c0,
                         CMatchBackend::MonteCarlo, 1e-3, 60, 0.5, cfg.exec);
    csv += "mc," + fmt(c0) + "," + fmt(mc.c_star) + "," + fmt(mc.residual) +
           "," + fmt(mc.se) + "," + std::to_string(mc.iterations) + "\n";
    worst_mc = std::max(worst_mc, std::fabs(mc.c_star - cfg.x));
    mc_se = std::max(mc_se, mc.se);
  }
  write_text(b.dir / "table.csv", csv);
  if (martingale) {
    b.check(worst_lattice <= 1e-9,
            "exact backend matches the start point, worst |c*-x| " +
                fmt(worst_lattice));
    b.check(worst_mc <= 4.0 * mc_se + 1e-3,
            "MC backend matches within 4 SE, worst |c*-x| " + fmt(worst_mc));
  } else {
    b.info("non-martingale dynamics: matching points reported per start, "
           "no closed-form target");
  }
}

// ---------------------------------------------------------------------------

void run_bellman_probe(const ExperimentConfig& cfg, Bundle& b) {
  LatticeModel model;
  model.n = 1;
  model.N = 2;
  model.dt = cfg.T / 2.0;
  model.initials = {cfg.x};

  ObstacleSpec plain;
  plain.name = "no-coupling";
  plain.gamma1 = 0.4;
  plain.h = [](double y, double) { return 0.4 * y; };
  plain.xi = [](double w) { return std::fabs(w); };
  LatticeMeanfieldSolution sol_plain = picard_meanfield_lattice(plain, model);
  const double v_plain = bellman_probe(sol_plain, plain, MeanStyle::RuleScalar);

  ObstacleSpec coupled;
  coupled.name = "mean-coupled";
  coupled.gamma2 = 0.3;
  coupled.h = [](double, double z) { return 0.3 * z * z; };
  // Decreasing sign-changing terminal payoff: tail rules can steer the
  // stopped mean away from the per-level mean, which is what the probe
  // is meant to expose.
  coupled.xi = [](double w) { return -w - 1.0; };
  coupled.lipschitz_flag = false;
  LatticeMeanfieldSolution sol_c =
      picard_meanfield_lattice(coupled, model, 1e-10, 200,
                               PicardInit::FlatXi, true);
  const double v_coupled = bellman_probe(sol_c, coupled, MeanStyle::RuleScalar);
  const double v_frozen = bellman_probe(sol_c, coupled, MeanStyle::FrozenMean);

  std::string csv = "case,violation\n";
  csv += "no-coupling," + fmt(v_plain) + "\n";
  csv += "mean-coupled," + fmt(v_coupled) + "\n";
  csv += "frozen-mean," + fmt(v_frozen) + "\n";
  write_text(b.dir / "table.csv", csv);
  b.check(v_plain <= 1e-12,
          "no mean coupling: dynamic-programming identity holds, gap " +
              fmt(v_plain));
  b.check(v_frozen <= 1e-12,
          "frozen mean: identity holds, gap " + fmt(v_frozen));
  b.check(v_coupled >= 1e-6,
          "mean coupling: identity fails, gap " + fmt(v_coupled));
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  auto take = [&](const char* key, auto& slot) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(slot);
    } catch (const std::exception&) {
      throw ConfigError(std::string("config: bad value at /") + key);
    }
    j.erase(key);
  };
  take("kind", c.kind);
  take("preset", c.preset_name);
  if (j.contains("seed")) {
    c.has_seed = true;
    take("seed", c.seed);
  }
  take("T", c.T);
  take("N", c.N);
  take("M", c.M);
  take("n_grid", c.n_grid);
  take("eps", c.eps);
  take("x", c.x);
  take("c_starts", c.c_starts);
  take("out", c.out_dir);
  if (!j.empty())
    throw ConfigError("config: unknown field /" + j.begin().key());
  return c;
}

int run_experiment(const ExperimentConfig& config) {
  if (!config.has_seed) throw ConfigError("config: /seed is mandatory");
  Bundle b;
  b.dir = config.out_dir;
  std::filesystem::create_directories(b.dir);
  json manifest;
  manifest["schema_version"] = 1;
  manifest["config"] = config_echo(config);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (config.kind == "oracle-suite")
      run_oracle_suite(config, b);
    else if (config.kind == "recursive-converge")
      run_recursive_converge(config, b);
    else if (config.kind == "sde-converge")
      run_sde_converge(config, b);
    else if (config.kind == "variance-demo")
      run_variance_demo(config, b);
    else if (config.kind == "markov-demo")
      run_markov_demo(config, b);
    else if (config.kind == "pedersen-match")
      run_pedersen_match(config, b);
    else if (config.kind == "bellman-probe")
      run_bellman_probe(config, b);
    else
      throw ConfigError("config: unknown experiment kind '" + config.kind +
                        "'");
  } catch (const std::exception& e) {
    b.ok = false;
    b.lines.push_back(std::string("[FAIL] run aborted: ") + e.what());
    manifest["error"] = e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  // Wall time is the one manifest field excluded from the determinism
  // contract.
  manifest["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  manifest["status"] = b.ok ? "pass" : "fail";
  write_text(b.dir / "manifest.json", manifest.dump(2) + "\n");
  std::string summary;
  for (const std::string& line : b.lines) summary += line + "\n";
  write_text(b.dir / "summary.txt", summary);
  return b.ok ? 0 : 1;
}

}  // namespace mfstop
