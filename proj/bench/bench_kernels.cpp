// Serial reference vs OpenMP kernels: fluid colony iterations and array
// traversal phases. Also checks that both produce identical maps.
//
//   bench_kernels [size] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "memant/aco.hpp"
#include "memant/array_sim.hpp"
#include "memant/imaging.hpp"

using namespace memant;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int k = 0; k < repeats; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2fx   identical %s\n", name, serial,
              parallel, serial / parallel, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 96;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("image %dx%d, %d threads, best of %d\n", n, n, omp_get_max_threads(), repeats);

  const imaging::Scene sc = imaging::synth_shapes(n, n, imaging::default_scene(n, n));
  const imaging::HeuristicMap eta = imaging::compute_heuristics(sc.image);

  aco::AcoParams params = aco::edge_preset();
  params.iterations = 3;
  aco::PheromoneMap tau_serial, tau_parallel;
  const double aco_serial = best_of(repeats, [&] {
    aco::Colony c(eta, params);
    for (int k = 0; k < params.iterations; ++k) c.step(aco::Execution::serial);
    tau_serial = c.tau();
  });
  const double aco_parallel = best_of(repeats, [&] {
    aco::Colony c(eta, params);
    for (int k = 0; k < params.iterations; ++k) c.step(aco::Execution::parallel);
    tau_parallel = c.tau();
  });
  report("fluid colony", aco_serial, aco_parallel, tau_serial == tau_parallel);

  const array::PhasePlan plan = array::plan_phases(n, n, 3);
  const array::InitParams init;
  array::ArrayState start(n, n);
  array::EnergyLedger scratch;
  array::init_array(start, eta, init, scratch);
  Grid<double> r_serial, r_parallel;
  const double hw_serial = best_of(repeats, [&] {
    array::ArrayState s = start;
    array::EnergyLedger l;
    array::run_traversal(s, plan, 2, array::PulseParams{}, l, {}, aco::Execution::serial);
    r_serial = s.resistance_map();
  });
  const double hw_parallel = best_of(repeats, [&] {
    array::ArrayState s = start;
    array::EnergyLedger l;
    array::run_traversal(s, plan, 2, array::PulseParams{}, l, {}, aco::Execution::parallel);
    r_parallel = s.resistance_map();
  });
  report("array traversal", hw_serial, hw_parallel, r_serial == r_parallel);
  return tau_serial == tau_parallel && r_serial == r_parallel ? 0 : 1;
}
