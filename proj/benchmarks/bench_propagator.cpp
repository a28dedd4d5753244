#include <benchmark/benchmark.h>

#include "wigner/classical_chaos.hpp"
#include "wigner/diagnostics.hpp"
#include "wigner/propagator.hpp"
#include "wigner/states.hpp"

using namespace wigner;

namespace {

WignerField initial(std::size_t n) {
  GridSpec spec;
  spec.nx = n;
  spec.np = n;
  return gaussian_wigner(GaussianInit{1.0, 0.0, 0.05, 0.2}, 0.1, make_grid(spec));
}

void BM_Step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  WignerField f = initial(n);
  DuffingParams p;
  EvolutionParams e;
  e.dt = p.drive_period() / 2048.0;
  Propagator prop(f.grid, p, e);
  double t = 0.0;
  for (auto _ : state) {
    prop.advance(f, t, 16);
    t += 16 * e.dt;
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_Step)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Measure(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const WignerField f = initial(n);
  for (auto _ : state) benchmark::DoNotOptimize(measure(f, 0.0, 0.1));
}
BENCHMARK(BM_Measure)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Lyapunov(benchmark::State& state) {
  DuffingParams p;
  LyapunovOptions o;
  o.t_total = 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(max_lyapunov(p, 1.0, 0.0, o).lambda_max);
}
BENCHMARK(BM_Lyapunov)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
