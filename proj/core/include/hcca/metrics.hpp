#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcca/engine.hpp"
#include "hcca/packet.hpp"
#include "hcca/units.hpp"

namespace hcca::metrics {

struct FlowMetrics {
  std::uint32_t flow = 0;
  std::int64_t delivered = 0;
  std::int64_t generated = 0;
  std::int64_t lost = 0;
  std::optional<double> mean_delay_ns;
  std::optional<Duration> p95_delay;
  std::optional<Duration> max_delay;
  Bytes delivered_bytes = 0;
};

// Mean of (recv - gen) over delivered packets. Lost packets are skipped.
// Empty when nothing was delivered.
std::optional<double> mean_e2e_delay(std::span<const PacketRecord> log);

// Nearest-rank percentile over delivered packets' delays, q in (0, 1].
std::optional<Duration> delay_percentile(std::span<const PacketRecord> log, double q);
std::optional<Duration> max_delay(std::span<const PacketRecord> log);

// Delivered bits / window, in bit/s. Throws hcca::Error for a non-positive
// window.
double aggregate_throughput(std::span<const PacketRecord> log, Duration window);

std::vector<FlowMetrics> flow_metrics(const sim::SimReport& report);

struct SummaryRow {
  SchedulerKind scheduler = SchedulerKind::adaptive;
  std::size_t stations = 0;
  std::string quality;
  std::optional<double> mean_delay_us;
  std::optional<double> p95_delay_us;
  std::optional<double> max_delay_us;
  double throughput_bps = 0;
  std::int64_t delivered = 0;
  std::int64_t lost = 0;
  std::int64_t overruns = 0;
};

SummaryRow summarize(const sim::SimReport& report);

// One row per report, ordered by (scheduler, stations). Throws hcca::Error if
// the reports do not share a scenario template or repeat a cell.
std::vector<SummaryRow> summarize(std::span<const sim::SimReport> reports);

// scheduler,stations,quality,mean_delay_us,p95_delay_us,max_delay_us,
// throughput_bps,delivered,lost,overruns
std::string summary_csv(std::span<const SummaryRow> rows);

// flow,generated,delivered,lost,queued,mean_delay_us,p95_delay_us,
// max_delay_us,delivered_bytes
std::string flow_csv(const sim::SimReport& report);

}  // namespace hcca::metrics
