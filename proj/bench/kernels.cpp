// Serial reference kernels against their OpenMP counterparts.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "mec/oracle.hpp"
#include "mec/sweep.hpp"

using namespace mec;

namespace {

// Largest single-terminal instance under the state limit used here:
// 16 cells x 4 fading levels x 6 task states x 11 queue levels = 4224 states.
const oracle::Model& big_model() {
  static const oracle::Model m = [] {
    Config cfg;
    cfg.sim.numWsps = 1;
    cfg.sim.mtsPerWsp = 1;
    cfg.sim.numBands = 1;
    cfg.sim.packetRateBps = 6e5;
    cfg.experiment.alwaysGranted = true;
    return oracle::build_model(cfg);
  }();
  return m;
}

std::vector<double> some_values(const oracle::Model& m) {
  std::vector<double> v(m.num_states());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 97) * 0.1;
  return v;
}

void BM_ExpectedNextSerial(benchmark::State& st) {
  const auto& m = big_model();
  const auto v = some_values(m);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::expected_next_serial(m, v));
}
void BM_ExpectedNextParallel(benchmark::State& st) {
  const auto& m = big_model();
  const auto v = some_values(m);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::expected_next_parallel(m, v));
}
void BM_BellmanSerial(benchmark::State& st) {
  const auto& m = big_model();
  const auto w = some_values(m);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::bellman_serial(m, w, 0.9));
}
void BM_BellmanParallel(benchmark::State& st) {
  const auto& m = big_model();
  const auto w = some_values(m);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::bellman_parallel(m, w, 0.9));
}

SweepSpec small_sweep() {
  SweepSpec s;
  s.ratesBps = {1.2e6, 1.8e6};
  s.policies = {Policy::ChannelAware, Policy::QueueAware};
  s.slots = 2000;
  s.seeds = 2;
  return s;
}

void BM_SweepSerial(benchmark::State& st) {
  const Config cfg;
  const auto spec = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(sweep_serial(spec, cfg));
}
void BM_SweepParallel(benchmark::State& st) {
  const Config cfg;
  const auto spec = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(sweep_parallel(spec, cfg));
}

}  // namespace

BENCHMARK(BM_ExpectedNextSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExpectedNextParallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BellmanSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BellmanParallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
