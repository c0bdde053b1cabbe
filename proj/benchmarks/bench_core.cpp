// Microbenchmarks for the hot paths: instance generation, tridiagonal
// eigensolves, schedule construction, time stepping, and the classical walk.
#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include <gluedtrees/column.hpp>
#include <gluedtrees/evolve.hpp>
#include <gluedtrees/graph.hpp>
#include <gluedtrees/schedule.hpp>
#include <gluedtrees/spectral.hpp>

namespace {

constexpr double kAlpha = 0.35355339059327373;

void BM_GenerateInstance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto g = gluedtrees::generate_instance(n, seed++);
    benchmark::DoNotOptimize(g.names.data());
  }
}
BENCHMARK(BM_GenerateInstance)->Arg(6)->Arg(10)->Arg(14);

void BM_EigenLow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = gluedtrees::column_hamiltonian(n, kAlpha, 0.3);
  for (auto _ : state) {
    auto pairs = gluedtrees::eigen_low(h, 3);
    benchmark::DoNotOptimize(pairs.data());
  }
}
BENCHMARK(BM_EigenLow)->Arg(10)->Arg(20)->Arg(40);

void BM_LowestEigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = gluedtrees::column_hamiltonian(n, kAlpha, 0.3);
  for (auto _ : state) {
    auto v = gluedtrees::lowest_eigenvalues(h, 3);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_LowestEigenvalues)->Arg(10)->Arg(20)->Arg(40);

void BM_GapAdaptedSchedule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto sched = gluedtrees::make_schedule(gluedtrees::ScheduleKind::gap_adapted, n,
                                           kAlpha, 0.4);
    benchmark::DoNotOptimize(sched.knot_t.data());
  }
}
BENCHMARK(BM_GapAdaptedSchedule)->Arg(8)->Arg(16);

void BM_EvolveLinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sched =
      gluedtrees::make_schedule(gluedtrees::ScheduleKind::linear, n, kAlpha, 1.0, 100.0);
  std::vector<std::complex<double>> psi0(2 * n + 2);
  psi0[0] = 1.0;
  for (auto _ : state) {
    auto res = gluedtrees::evolve(n, kAlpha, sched, psi0, 2);
    benchmark::DoNotOptimize(res.final_state.data());
  }
}
BENCHMARK(BM_EvolveLinear)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ClassicalWalk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = gluedtrees::generate_instance(n, 1);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto w = gluedtrees::classical_random_walk(g, seed++, 1000000);
    benchmark::DoNotOptimize(w.queries_used);
  }
}
BENCHMARK(BM_ClassicalWalk)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
