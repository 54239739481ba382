#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "mfstop/errors.hpp"
#include "mfstop/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw mfstop::ConfigError("cannot read config file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field optimal stopping experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;

  const char* kinds[] = {"oracle-suite",  "recursive-converge",
                         "sde-converge",  "variance-demo",
                         "markov-demo",   "pedersen-match",
                         "bellman-probe"};
  for (const char* kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed (overrides the config)")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads,
                    "worker count; affects speed only, never results");
  }

  CLI11_PARSE(app, argc, argv);

  try {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    mfstop::ExperimentConfig cfg;
    if (!config_path.empty())
      cfg = mfstop::config_from_json_text(slurp(config_path));
    cfg.kind = app.get_subcommands().front()->get_name();
    if (seed_given) {
      cfg.seed = seed;
      cfg.has_seed = true;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const int status = mfstop::run_experiment(cfg);
    std::ifstream summary(cfg.out_dir + "/summary.txt");
    std::printf("%s", std::string(std::istreambuf_iterator<char>(summary),
                                  std::istreambuf_iterator<char>())
                          .c_str());
    return status;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
