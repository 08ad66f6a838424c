#include <benchmark/benchmark.h>

#include "mesoperc/domains.hpp"
#include "mesoperc/percolation.hpp"

using namespace mesoperc;

namespace {

void BM_Crossing(benchmark::State& state, Engine engine) {
  const QuadDomain q = triangular_rhombus(static_cast<int>(state.range(0)));
  const CrossingSpec spec = crossing_spec(q.marked);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crossing_probability(q.marked.triangulation, spec, 1000, seed++, 0.5, engine));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
  state.counters["vertices"] = q.marked.triangulation.vertex_count();
}

void BM_Observables(benchmark::State& state, Engine engine) {
  const TriangleDomain d = triangular_triangle(static_cast<int>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_observables(d.marked, 200, seed++, 0.5, engine));
  }
  state.SetItemsProcessed(state.iterations() * 200);
}

}  // namespace

BENCHMARK_CAPTURE(BM_Crossing, parallel, Engine::parallel)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Crossing, serial, Engine::serial)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Observables, parallel, Engine::parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Observables, serial, Engine::serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
