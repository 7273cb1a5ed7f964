#include "hcca/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

namespace hcca {

std::vector<SweepCell> sweep_cells(const ScenarioConfig& base, std::pair<std::size_t, std::size_t> stations,
                                   const std::vector<SchedulerKind>& schedulers)
{
  std::vector<SweepCell> cells;
  for (SchedulerKind s : schedulers)
    for (std::size_t n = stations.first; n <= stations.second; ++n) cells.push_back({s, n, base.seed + n});
  return cells;
}

std::vector<sim::SimReport> run_sweep(const ScenarioConfig& base, std::pair<std::size_t, std::size_t> stations,
                                      const std::vector<SchedulerKind>& schedulers, unsigned threads)
{
  const auto cells = sweep_cells(base, stations, schedulers);
  std::vector<std::optional<sim::SimReport>> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        ScenarioConfig cfg = base.with_stations(cells[i].stations);
        cfg.scheduler = cells[i].scheduler;
        cfg.seed = cells[i].seed;
        results[i] = sim::run(cfg);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<sim::SimReport> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace hcca
