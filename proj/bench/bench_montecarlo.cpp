// Serial reference vs OpenMP deviation study on the 4-tenant, 20-cell family.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "slicegame/experiments.hpp"

using namespace slicegame;

namespace {

ScenarioFamily family(int replications) {
  ScenarioFamily f;
  f.num_tenants = 4;
  f.num_cells = 20;
  f.alpha = 3.0;
  f.replications = replications;
  return f;
}

void BM_DeviationStudySerial(benchmark::State &state) {
  const ScenarioFamily f = family(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(deviation_study_serial(f, AbrdConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DeviationStudyParallel(benchmark::State &state) {
  const ScenarioFamily f = family(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(deviation_study(f, AbrdConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

} // namespace

BENCHMARK(BM_DeviationStudySerial)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeviationStudyParallel)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
