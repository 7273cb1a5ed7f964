#include <benchmark/benchmark.h>

#include "hcca/engine.hpp"

using namespace hcca;
using namespace std::chrono_literals;

static void BM_Run(benchmark::State& state)
{
  ScenarioConfig c;
  c.scheduler = state.range(1) ? SchedulerKind::adaptive : SchedulerKind::reference;
  c.traffic_start = 2s;
  c.duration = 12s;
  c = c.with_stations(static_cast<std::size_t>(state.range(0)));
  std::int64_t events = 0;
  for (auto _ : state) {
    const auto r = sim::run(c);
    events += static_cast<std::int64_t>(r.events);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Run)->Args({1, 0})->Args({1, 1})->Args({8, 0})->Args({8, 1})->Unit(benchmark::kMillisecond);
