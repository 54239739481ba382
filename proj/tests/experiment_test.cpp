#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "mfstop/errors.hpp"
#include "mfstop/experiment.hpp"

using namespace mfstop;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("mfstop-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("all fields land where they should") {
    const auto cfg = config_from_json_text(R"({
      "kind": "recursive-converge", "preset": "recursive-linear",
      "seed": 42, "T": 2.0, "N": 4, "M": 500, "n_grid": [2, 4],
      "eps": 0.75, "x": 1.5, "out": "somewhere"})");
    CHECK(cfg.kind == "recursive-converge");
    CHECK(cfg.preset_name == "recursive-linear");
    CHECK(cfg.seed == 42);
    CHECK(cfg.has_seed);
    CHECK(cfg.T == 2.0);
    CHECK(cfg.N == 4);
    CHECK(cfg.M == 500);
    CHECK(cfg.n_grid == std::vector<int>{2, 4});
    CHECK(cfg.eps == 0.75);
    CHECK(cfg.x == 1.5);
    CHECK(cfg.out_dir == "somewhere");
  }
  SUBCASE("bad values are reported with their path") {
    try {
      config_from_json_text(R"({"kind": "bellman-probe", "N": "four"})");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("/N") != std::string::npos);
    }
  }
  SUBCASE("unknown fields are rejected, with their name") {
    try {
      config_from_json_text(R"({"kind": "bellman-probe", "bogus": 1})");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
  }
  SUBCASE("malformed JSON is a config error") {
    CHECK_THROWS_AS(config_from_json_text("{nope"), ConfigError);
  }
}

TEST_CASE("a run without a seed is refused up front") {
  TempDir tmp("noseed");
  ExperimentConfig cfg;
  cfg.kind = "bellman-probe";
  cfg.out_dir = (tmp.path / "run").string();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("bundle layout and reproducibility") {
  TempDir tmp("bundle");
  ExperimentConfig cfg;
  cfg.kind = "bellman-probe";
  cfg.seed = 7;
  cfg.has_seed = true;

  cfg.out_dir = (tmp.path / "a").string();
  CHECK(run_experiment(cfg) == 0);
  for (const char* f : {"manifest.json", "summary.txt", "table.csv"})
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / f));

  const std::string summary = slurp(std::filesystem::path(cfg.out_dir) /
                                    "summary.txt");
  CHECK(summary.find("[PASS]") != std::string::npos);
  CHECK(summary.find("[FAIL]") == std::string::npos);

  // identical seed, fresh directory: CSV output is byte-identical
  ExperimentConfig cfg2 = cfg;
  cfg2.out_dir = (tmp.path / "b").string();
  CHECK(run_experiment(cfg2) == 0);
  CHECK(slurp(std::filesystem::path(cfg.out_dir) / "table.csv") ==
        slurp(std::filesystem::path(cfg2.out_dir) / "table.csv"));

  const std::string manifest = slurp(std::filesystem::path(cfg.out_dir) /
                                     "manifest.json");
  CHECK(manifest.find("\"schema_version\"") != std::string::npos);
  CHECK(manifest.find("\"status\"") != std::string::npos);
}

TEST_CASE("a failing run still leaves a manifest behind") {
  TempDir tmp("fail");
  ExperimentConfig cfg;
  cfg.kind = "recursive-converge";
  cfg.preset_name = "state-call";  // wrong mode for this experiment
  cfg.seed = 7;
  cfg.has_seed = true;
  cfg.M = 50;
  cfg.n_grid = {2, 4, 8};
  cfg.out_dir = (tmp.path / "run").string();
  CHECK(run_experiment(cfg) != 0);
  const std::string manifest = slurp(std::filesystem::path(cfg.out_dir) /
                                     "manifest.json");
  CHECK(manifest.find("\"error\"") != std::string::npos);
}
