#include <benchmark/benchmark.h>

#include "ecoinfer/engine.hpp"
#include "ecoinfer/grid.hpp"
#include "ecoinfer/power.hpp"
#include "ecoinfer/scenario.hpp"
#include "ecoinfer/signal.hpp"
#include "ecoinfer/workload.hpp"

using namespace ecoinfer;

namespace {

ScenarioConfig scenario(std::int64_t requests, double qps = 6.45) {
  auto c = default_scenario();
  c.workload.num_requests = requests;
  c.workload.qps = qps;
  c.finalize();
  return c;
}

void BM_FlopsForStage(benchmark::State& state) {
  const auto model = builtin_model("llama-3-8b");
  std::vector<TokenWork> batch;
  for (int i = 0; i < state.range(0); ++i) batch.push_back({1, 2048 + i});
  for (auto _ : state) benchmark::DoNotOptimize(flops_for_stage(model, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FlopsForStage)->Arg(1)->Arg(128);

void BM_Generate(benchmark::State& state) {
  auto w = scenario(state.range(0)).workload;
  for (auto _ : state) benchmark::DoNotOptimize(generate(w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(1 << 12)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_EngineRun(benchmark::State& state) {
  const auto c = scenario(state.range(0));
  const auto trace = generate(c.workload);
  for (auto _ : state) benchmark::DoNotOptimize(run(trace, c.cluster));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EngineRun)->Arg(1 << 10)->Arg(1 << 12)->Unit(benchmark::kMillisecond);

void BM_PowerAndBin(benchmark::State& state) {
  const auto c = scenario(1 << 12);
  const auto sim = run(generate(c.workload), c.cluster);
  BinOptions opt;
  opt.idle_floor_w = c.cluster.gpu.p_idle_w * c.cluster.gpu_count();
  for (auto _ : state) {
    const auto samples = stages_to_power(sim.records, c.cluster);
    benchmark::DoNotOptimize(bin_power(samples, opt));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.records.size()));
}
BENCHMARK(BM_PowerAndBin)->Unit(benchmark::kMillisecond);

GridScenario week(GridPolicy policy) {
  GridScenario s;
  const auto start = parse_iso8601("2025-06-02T00:00:00Z");
  s.load.start = start;
  s.solar.kind = EnvKind::SolarIrradiance;
  s.ci.kind = EnvKind::CarbonIntensity;
  for (int m = 0; m < 7 * 1440; ++m) {
    const int minute_of_day = m % 1440;
    s.load.values.push_back(250.0 + 150.0 * ((m / 7) % 3 == 0));
    s.solar.timestamps.push_back(start + std::chrono::minutes{m});
    s.solar.values.push_back(minute_of_day >= 480 && minute_of_day < 960 ? 1.0 : 0.0);
    s.ci.timestamps.push_back(start + std::chrono::minutes{m});
    s.ci.values.push_back(minute_of_day >= 540 && minute_of_day < 1020 ? 90.0 : 450.0);
  }
  s.solar.timestamps.push_back(start + std::chrono::minutes{7 * 1440});
  s.solar.values.push_back(0.0);
  s.ci.timestamps.push_back(start + std::chrono::minutes{7 * 1440});
  s.ci.values.push_back(450.0);
  s.policy = policy;
  return s;
}

void BM_CosimWeek(benchmark::State& state) {
  const auto s = week(state.range(0) ? GridPolicy::CarbonThreshold : GridPolicy::Passive);
  for (auto _ : state) benchmark::DoNotOptimize(cosimulate(s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.load.values.size()));
}
BENCHMARK(BM_CosimWeek)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
