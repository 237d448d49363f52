// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <atsss/config.hpp>
#include <atsss/sim_engine.hpp>

using namespace atsss;

namespace {

void BM_SimRun(benchmark::State& state) {
  auto cfg = config::load_config(std::string(ATSSS_BENCH_CONFIG_DIR) + "/paper-lb.json");
  cfg.duration_s = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::run(cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetLabel("items = simulated seconds");
}
BENCHMARK(BM_SimRun)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
