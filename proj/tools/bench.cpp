#include <cstdlib>
// Times the serial reference against the OpenMP path on the same work.
#include <chrono>
#include <cmath>
#include <cstdio>

#include "mfstop/picard.hpp"
#include "mfstop/sde.hpp"
#include "mfstop/stopping.hpp"

using namespace mfstop;

namespace {

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

double run_pipeline(Exec exec, int M, int n, int N) {
  const TimeGrid grid = make_time_grid(1.0, N);
  DriverEnsemble drivers = sample_drivers(grid, n, M, 0x9e3779b9u, exec);
  RegressionSpec reg;
  ObstacleSpec spec;
  spec.name = "linear";
  spec.gamma1 = 0.2;
  spec.gamma2 = 0.1;
  spec.h = [](double y, double z) { return 0.2 * y + 0.1 * z; };
  spec.xi = [](double w) { return std::fabs(w); };
  McSolution sol = picard_interacting_mc(spec, drivers, reg, 1e-4, 50,
                                         false, exec);
  StoppingReport rep = compute_z_and_hit(sol.values, -1.0, exec);
  return evaluate_rule_mc(rep.hit_index, sol.values.Y, sol.xi, M, n, N, spec,
                          RewardMode::Interacting, 0, exec)
      .value;
}

}  // namespace

int main(int argc, char** argv) {
  int M = 4000, n = 16, N = 8;
  if (argc > 1) M = std::atoi(argv[1]);
  if (argc > 2) n = std::atoi(argv[2]);
  if (argc > 3) N = std::atoi(argv[3]);

  double v_serial = 0.0, v_parallel = 0.0;
  const double warm = time_ms([&] { v_parallel = run_pipeline(Exec::Parallel, M, n, N); });
  const double par = time_ms([&] { v_parallel = run_pipeline(Exec::Parallel, M, n, N); });
  const double ser = time_ms([&] { v_serial = run_pipeline(Exec::Serial, M, n, N); });

  std::printf("pipeline M=%d n=%d N=%d (warmup %.0f ms)\n", M, n, N, warm);
  std::printf("  serial   %10.1f ms   value %.17g\n", ser, v_serial);
  std::printf("  parallel %10.1f ms   value %.17g\n", par, v_parallel);
  std::printf("  speedup  %10.2fx   results %s\n", ser / par,
              v_serial == v_parallel ? "bit-identical" : "DIFFER");
  return v_serial == v_parallel ? 0 : 1;
}
