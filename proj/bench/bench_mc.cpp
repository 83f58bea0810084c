// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "ldhom/montecarlo.hpp"

namespace {

using ldhom::McConfig;
using ldhom::McProblem;
using ldhom::MediaModel;

const McProblem& convolved_problem() {
  static const McProblem problem(MediaModel{ldhom::ConvolvedCoarse::box(1, 1.0, 1)}, ldhom::SourceSpec::indicator(),
                                 0.01, 0.5);
  return problem;
}

const McProblem& parameterized_problem() {
  static const McProblem problem(MediaModel{ldhom::mild_preset()}, ldhom::SourceSpec::indicator(), 0.01, 0.5);
  return problem;
}

McConfig config(const benchmark::State& state) {
  return {static_cast<std::size_t>(state.range(0)), 7, ldhom::Observable::Solution, 0};
}

void BM_ConvolvedSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ldhom::run_convolved_is_serial(convolved_problem(), 0.1, config(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ConvolvedOpenMP(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ldhom::run_convolved_is(convolved_problem(), 0.1, config(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParameterizedSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(ldhom::run_parameterized_is_serial(parameterized_problem(), 2.0, config(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParameterizedOpenMP(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(ldhom::run_parameterized_is(parameterized_problem(), 2.0, config(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ConvolvedSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolvedOpenMP)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParameterizedSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParameterizedOpenMP)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
