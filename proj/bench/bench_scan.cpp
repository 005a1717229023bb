// Serial reference vs OpenMP kernels on the main hot paths.

#include <benchmark/benchmark.h>

#include "subset/penalties.hpp"
#include "subset/simlab.hpp"
#include "subset/wbs.hpp"

namespace {

using namespace subset;

TimeSeriesMatrix noise_panel(std::size_t d, std::size_t n) {
  NullModel null;
  RandomSource rng(1);
  return generate_null(null, n, d, rng);
}

void BM_ScanReference(benchmark::State& state) {
  const std::size_t d = state.range(0), n = state.range(1);
  const auto model = CostModel::gaussian(noise_panel(d, n), {1.0});
  const auto pen = theoretical_penalties(n, d);
  for (auto _ : state) benchmark::DoNotOptimize(scan_interval_reference(model, pen, {1, n}));
  state.SetItemsProcessed(state.iterations() * d * n);
}

void BM_Scan(benchmark::State& state, Execution exec) {
  const std::size_t d = state.range(0), n = state.range(1);
  const auto model = CostModel::gaussian(noise_panel(d, n), {1.0});
  const auto pen = theoretical_penalties(n, d);
  for (auto _ : state) benchmark::DoNotOptimize(scan_interval(model, pen, {1, n}, exec));
  state.SetItemsProcessed(state.iterations() * d * n);
}

void BM_Wbs(benchmark::State& state, Execution exec) {
  const std::size_t d = state.range(0), n = state.range(1);
  const auto spec = amoc_scenario(n, d, n / 2, 0.1, 1.0);
  RandomSource rng(2);
  const auto data = generate(spec, rng).data;
  const auto model = CostModel::gaussian(data, {1.0});
  const auto pen = theoretical_penalties(n, d);
  RandomSource irng(3);
  const auto iv = draw_intervals(n, 200, irng);
  for (auto _ : state) benchmark::DoNotOptimize(subset_wbs(model, pen, iv, exec));
}

void BM_Calibrate(benchmark::State& state, Execution exec) {
  CalibrationSpec spec;
  spec.n = state.range(1);
  spec.d = state.range(0);
  spec.reps = 40;
  spec.intervals = 50;
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_beta(spec, RandomSource(4), exec));
}

}  // namespace

BENCHMARK(BM_ScanReference)->Args({12, 1000})->Args({200, 200})->Args({1000, 1000});
BENCHMARK_CAPTURE(BM_Scan, serial, Execution::serial)->Args({12, 1000})->Args({200, 200})->Args({1000, 1000});
BENCHMARK_CAPTURE(BM_Scan, parallel, Execution::parallel)->Args({12, 1000})->Args({200, 200})->Args({1000, 1000});
BENCHMARK_CAPTURE(BM_Wbs, serial, Execution::serial)->Args({12, 1000})->Args({200, 400})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Wbs, parallel, Execution::parallel)->Args({12, 1000})->Args({200, 400})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Calibrate, serial, Execution::serial)->Args({20, 200})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Calibrate, parallel, Execution::parallel)->Args({20, 200})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
