// Serial reference vs OpenMP batch over independent utterances. On a single
// core the two should be close; the parallel path only pays off with threads.

#include <benchmark/benchmark.h>

#include "rsnn/batch.hpp"
#include "rsnn/fixtures.hpp"

namespace {

using namespace rsnn;

constexpr int kFrames = 256;
constexpr std::size_t kUttLen = 32;

const Model& bench_model() {
  static const Model m = gen_random_model(1, build_pruned_config(), 0.35).model;
  return m;
}

const std::vector<FeatureFrame>& bench_frames() {
  static const auto f = random_features(2, kFrames, 40);
  return f;
}

Engine engine_of(int64_t v) { return v == 0 ? Engine::golden : Engine::sim; }

void BM_Serial(benchmark::State& state) {
  const auto engine = engine_of(state.range(0));
  const accel::SimOptions opt{true, true, static_cast<int>(state.range(1))};
  for (auto _ : state) {
    auto r = run_batch_serial(bench_model(), bench_frames(), kUttLen, engine, opt);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * kFrames);
}

void BM_Parallel(benchmark::State& state) {
  const auto engine = engine_of(state.range(0));
  const accel::SimOptions opt{true, true, static_cast<int>(state.range(1))};
  const int jobs = static_cast<int>(state.range(2));
  for (auto _ : state) {
    auto r = run_batch_parallel(bench_model(), bench_frames(), kUttLen, engine, opt, jobs);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * kFrames);
}

}  // namespace

// Args: engine (0 golden, 1 sim), time steps[, jobs]. Wall time, since CPU
// time on the calling thread hides the worker threads.
BENCHMARK(BM_Serial)->ArgNames({"engine", "ts"})->ArgsProduct({{0, 1}, {1, 2}})->UseRealTime();
BENCHMARK(BM_Parallel)
    ->ArgNames({"engine", "ts", "jobs"})
    ->ArgsProduct({{0, 1}, {1, 2}, {1, 2, 4}})
    ->UseRealTime();

BENCHMARK_MAIN();
