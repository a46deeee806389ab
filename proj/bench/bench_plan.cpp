// Serial vs OpenMP execution of benchmark plans.
#include <benchmark/benchmark.h>

#include "condgrad/harness.hpp"

namespace {

using namespace condgrad;

harness::BenchPlan plan_for(int series) {
  harness::BenchPlan plan = harness::default_plan();
  std::erase_if(plan.cells, [&](const ProblemSpec& c) { return c.series != series; });
  return plan;
}

void BM_Plan(benchmark::State& state, harness::Execution exec) {
  const auto plan = plan_for(static_cast<int>(state.range(0)));
  std::int64_t iterations = 0;
  for (auto _ : state) {
    const auto rows = harness::run_plan(plan, exec);
    for (const auto& r : rows) iterations += r.it;
    benchmark::DoNotOptimize(iterations);
  }
  state.counters["solver_it"] =
      benchmark::Counter(static_cast<double>(iterations), benchmark::Counter::kAvgIterations);
}

void BM_Serial(benchmark::State& state) { BM_Plan(state, harness::Execution::Serial); }
void BM_Parallel(benchmark::State& state) { BM_Plan(state, harness::Execution::Parallel); }

void BM_SingleSolve(benchmark::State& state) {
  const ProblemSpec spec{1, 0, static_cast<std::size_t>(state.range(0)), 10.0};
  const Method method = static_cast<Method>(state.range(1));
  for (auto _ : state) {
    auto row = harness::run_single(spec, method, {});
    benchmark::DoNotOptimize(row.it);
  }
  state.SetLabel(std::string(to_string(method)));
}

}  // namespace

BENCHMARK(BM_Serial)->DenseRange(1, 4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->DenseRange(1, 4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SingleSolve)
    ->ArgsProduct({{20, 100}, {0, 1, 2, 4}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
