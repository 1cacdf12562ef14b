// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "jrsim/oracle.hpp"
#include "jrsim/presets.hpp"

using namespace jrsim;

namespace {

void BM_OracleSerial(benchmark::State& state) {
  const auto inst = TinyInstance::reference();
  const auto ch = sample_channel(inst.cfg, 3);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_best_serial(inst, ch).best_ee);
}
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

void BM_OracleParallel(benchmark::State& state) {
  const auto inst = TinyInstance::reference();
  const auto ch = sample_channel(inst.cfg, 3);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_best(inst, ch).best_ee);
}
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);

std::vector<AllocationDecision> decisions(const NetworkConfig& cfg, int n) {
  Environment env(cfg);
  Rng rng(11);
  std::vector<AllocationDecision> out;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(env.action_size()));
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = rng.uniform(-1.0, 1.0);
    out.push_back(decode_action(a, cfg, env.layout()));
  }
  return out;
}

void BM_BatchRewardsSerial(benchmark::State& state) {
  const auto cfg = builtin_config();
  const auto ch = sample_channel(cfg, 1);
  const auto ds = decisions(cfg, 512);
  for (auto _ : state) benchmark::DoNotOptimize(batch_rewards_serial(cfg, ch, ds));
}
BENCHMARK(BM_BatchRewardsSerial)->Unit(benchmark::kMillisecond);

void BM_BatchRewardsParallel(benchmark::State& state) {
  const auto cfg = builtin_config();
  const auto ch = sample_channel(cfg, 1);
  const auto ds = decisions(cfg, 512);
  for (auto _ : state) benchmark::DoNotOptimize(batch_rewards_parallel(cfg, ch, ds));
}
BENCHMARK(BM_BatchRewardsParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
