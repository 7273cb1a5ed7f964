#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hcca/sched.hpp"

using namespace hcca;
using namespace std::chrono_literals;

static void BM_ReferenceTxop(benchmark::State& state)
{
  const phy::PhyParams p;
  const auto t = *sched::tspec_preset("jurassic-high");
  const auto si = sched::assign_si(120ms, 40ms);
  for (auto _ : state) benchmark::DoNotOptimize(sched::reference_txop(t, si, p));
}
BENCHMARK(BM_ReferenceTxop);

static void BM_AdaptiveTxop(benchmark::State& state)
{
  const phy::PhyParams p;
  const auto t = *sched::tspec_preset("jurassic-high");
  Bytes size = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sched::adaptive_txop(size, t, p));
    size = size % 20000 + 1;
  }
}
BENCHMARK(BM_AdaptiveTxop);

static void BM_AdmitSequence(benchmark::State& state)
{
  const phy::PhyParams p;
  std::mt19937_64 rng(1);
  std::vector<sched::Tspec> flows(static_cast<std::size_t>(state.range(0)));
  for (auto& t : flows) {
    t = *sched::tspec_preset("jurassic-low");
    t.max_service_interval = Duration{(20 + static_cast<std::int64_t>(rng() % 60)) * 1'000'000};
    t.delay_bound = 100ms;
  }
  for (auto _ : state) {
    sched::AdmissionState s(120ms, 0ms, p);
    for (std::size_t i = 0; i < flows.size(); ++i) {
      auto d = sched::admit(s, static_cast<sched::FlowId>(i), flows[i]);
      if (d.accepted) s = std::move(d.state);
    }
    benchmark::DoNotOptimize(s.admitted().size());
  }
}
BENCHMARK(BM_AdmitSequence)->Arg(4)->Arg(12);
