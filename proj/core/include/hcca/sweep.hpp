#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hcca/engine.hpp"
#include "hcca/scenario.hpp"

namespace hcca {

struct SweepCell {
  SchedulerKind scheduler = SchedulerKind::adaptive;
  std::size_t stations = 0;
  std::uint64_t seed = 0;
};

// Grid in (scheduler, stations) order. A cell's seed is base_seed plus its
// station count, so both schedulers see the same random draws at equal load
// and adding cells never perturbs existing ones.
std::vector<SweepCell> sweep_cells(const ScenarioConfig& base, std::pair<std::size_t, std::size_t> stations,
                                   const std::vector<SchedulerKind>& schedulers);

// Runs every cell on up to `threads` workers (0 = hardware concurrency).
// Reports come back in cell order regardless of completion order.
std::vector<sim::SimReport> run_sweep(const ScenarioConfig& base, std::pair<std::size_t, std::size_t> stations,
                                      const std::vector<SchedulerKind>& schedulers, unsigned threads = 0);

}  // namespace hcca
