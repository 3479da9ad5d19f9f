#include <benchmark/benchmark.h>

#include <vector>

#include "linefit/eval.hpp"
#include "linefit/extract.hpp"
#include "linefit/raster.hpp"
#include "linefit/simulate.hpp"

using namespace linefit;

namespace {

const Annotation& bench_annotation() {
  static const Annotation a = gen_annotation(1);
  return a;
}

const Heatmap& bench_prediction() {
  static const Heatmap h = [] {
    CorruptionConfig c;
    c.drop_rate = 0.3;
    c.jitter_sigma = 1.0;
    c.blob_count = 2;
    c.seed = 1;
    return simulate_prediction(bench_annotation(), RasterConfig{}, c);
  }();
  return h;
}

std::vector<EvalCase> bench_dataset(size_t n) {
  std::vector<EvalCase> dataset;
  for (size_t i = 0; i < n; ++i) {
    EvalCase c;
    c.annotation = gen_annotation(100 + i);
    CorruptionConfig corr;
    corr.drop_rate = 0.3;
    corr.jitter_sigma = 1.0;
    corr.seed = 100 + i;
    c.prediction = simulate_prediction(c.annotation, RasterConfig{}, corr);
    dataset.push_back(std::move(c));
  }
  return dataset;
}

void BM_rasterize_parallel(benchmark::State& state) {
  const Annotation& a = bench_annotation();
  for (auto _ : state)
    benchmark::DoNotOptimize(rasterize(a.segments, RasterConfig{}));
}

void BM_rasterize_serial(benchmark::State& state) {
  const Annotation& a = bench_annotation();
  for (auto _ : state)
    benchmark::DoNotOptimize(rasterize_reference(a.segments, RasterConfig{}));
}

void BM_extract_parallel(benchmark::State& state) {
  const Heatmap& h = bench_prediction();
  for (auto _ : state)
    for (uint32_t ch = 0; ch < 3; ++ch)
      benchmark::DoNotOptimize(extract_points(h, ch));
}

void BM_extract_serial(benchmark::State& state) {
  const Heatmap& h = bench_prediction();
  for (auto _ : state)
    for (uint32_t ch = 0; ch < 3; ++ch)
      benchmark::DoNotOptimize(extract_points_reference(h, ch));
}

void BM_evaluate_parallel(benchmark::State& state) {
  const auto dataset = bench_dataset(static_cast<size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate(dataset, EvalConfig{}));
}

void BM_evaluate_serial(benchmark::State& state) {
  const auto dataset = bench_dataset(static_cast<size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_reference(dataset, EvalConfig{}));
}

void BM_keypoint_experiment(benchmark::State& state) {
  KeypointExperimentConfig cfg;
  cfg.n_trials = static_cast<int>(state.range(0));
  cfg.seed = 2;
  for (auto _ : state) benchmark::DoNotOptimize(keypoint_experiment(cfg));
}

BENCHMARK(BM_rasterize_parallel);
BENCHMARK(BM_rasterize_serial);
BENCHMARK(BM_extract_parallel);
BENCHMARK(BM_extract_serial);
BENCHMARK(BM_evaluate_parallel)->Arg(16);
BENCHMARK(BM_evaluate_serial)->Arg(16);
BENCHMARK(BM_keypoint_experiment)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
