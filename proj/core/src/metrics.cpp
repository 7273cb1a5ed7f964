#include "hcca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "hcca/error.hpp"

namespace hcca::metrics {

namespace {

std::vector<Duration> sorted_delays(std::span<const PacketRecord> log)
{
  std::vector<Duration> d;
  d.reserve(log.size());
  for (const auto& r : log)
    if (!r.lost) d.push_back(r.delay());
  std::sort(d.begin(), d.end());
  return d;
}

std::string opt_us(const std::optional<double>& v)
{
  return v ? fmt::format("{}", std::llround(*v)) : std::string("NA");
}

std::optional<double> to_us(const std::optional<Duration>& d)
{
  if (!d) return std::nullopt;
  return to_micros(*d);
}

}  // namespace

std::optional<double> mean_e2e_delay(std::span<const PacketRecord> log)
{
  // Integer sum keeps the mean independent of log order.
  Int128 sum = 0;
  std::int64_t n = 0;
  for (const auto& r : log) {
    if (r.lost) continue;
    sum += r.delay().count();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(sum) / static_cast<double>(n);
}

std::optional<Duration> delay_percentile(std::span<const PacketRecord> log, double q)
{
  if (!(q > 0.0 && q <= 1.0)) throw Error("delay_percentile: q must lie in (0, 1]");
  const auto d = sorted_delays(log);
  if (d.empty()) return std::nullopt;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(d.size())));
  return d[std::clamp<std::size_t>(rank, 1, d.size()) - 1];
}

std::optional<Duration> max_delay(std::span<const PacketRecord> log)
{
  std::optional<Duration> m;
  for (const auto& r : log)
    if (!r.lost && (!m || r.delay() > *m)) m = r.delay();
  return m;
}

double aggregate_throughput(std::span<const PacketRecord> log, Duration window)
{
  if (window.count() <= 0) throw Error("aggregate_throughput: duration must be positive");
  Bytes total = 0;
  for (const auto& r : log)
    if (!r.lost) total += r.size;
  return static_cast<double>(total) * 8.0 / to_seconds(window);
}

std::vector<FlowMetrics> flow_metrics(const sim::SimReport& report)
{
  std::map<std::uint32_t, std::vector<PacketRecord>> per_flow;
  for (const auto& r : report.packets) per_flow[r.flow].push_back(r);

  std::vector<FlowMetrics> out;
  for (const auto& c : report.flows) {
    const auto& log = per_flow[c.flow];
    FlowMetrics m;
    m.flow = c.flow;
    m.delivered = c.delivered;
    m.generated = c.generated;
    m.lost = c.lost;
    m.mean_delay_ns = mean_e2e_delay(log);
    m.p95_delay = delay_percentile(log, 0.95);
    m.max_delay = max_delay(log);
    m.delivered_bytes = c.delivered_bytes;
    out.push_back(m);
  }
  return out;
}

SummaryRow summarize(const sim::SimReport& report)
{
  SummaryRow row;
  row.scheduler = report.scheduler;
  row.stations = report.stations;
  row.quality = report.quality;
  if (auto m = mean_e2e_delay(report.packets)) row.mean_delay_us = *m / 1e3;
  row.p95_delay_us = to_us(delay_percentile(report.packets, 0.95));
  row.max_delay_us = to_us(max_delay(report.packets));
  const Duration window = report.throughput_window();
  row.throughput_bps = window.count() > 0 ? aggregate_throughput(report.packets, window) : 0.0;
  for (const auto& r : report.packets) {
    if (r.lost)
      ++row.lost;
    else
      ++row.delivered;
  }
  row.overruns = report.overruns;
  return row;
}

std::vector<SummaryRow> summarize(std::span<const sim::SimReport> reports)
{
  std::vector<SummaryRow> rows;
  if (reports.empty()) return rows;
  std::set<std::pair<int, std::size_t>> seen;
  for (const auto& r : reports) {
    if (r.template_key != reports.front().template_key)
      throw Error("summarize: reports come from different scenario templates");
    if (!seen.emplace(static_cast<int>(r.scheduler), r.stations).second)
      throw Error(fmt::format("summarize: duplicate cell ({}, {} stations)", to_string(r.scheduler), r.stations));
    rows.push_back(summarize(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return a.scheduler != b.scheduler ? a.scheduler < b.scheduler : a.stations < b.stations;
  });
  return rows;
}

std::string summary_csv(std::span<const SummaryRow> rows)
{
  std::string out =
      "scheduler,stations,quality,mean_delay_us,p95_delay_us,max_delay_us,throughput_bps,delivered,lost,overruns\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{:.1f},{},{},{}\n", to_string(r.scheduler), r.stations, r.quality,
                       opt_us(r.mean_delay_us), opt_us(r.p95_delay_us), opt_us(r.max_delay_us), r.throughput_bps,
                       r.delivered, r.lost, r.overruns);
  }
  return out;
}

std::string flow_csv(const sim::SimReport& report)
{
  std::string out = "flow,generated,delivered,lost,queued,mean_delay_us,p95_delay_us,max_delay_us,delivered_bytes\n";
  const auto metrics = flow_metrics(report);
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const auto& m = metrics[i];
    const auto& c = report.flows[i];
    std::optional<double> mean_us;
    if (m.mean_delay_ns) mean_us = *m.mean_delay_ns / 1e3;
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", m.flow, m.generated, m.delivered, m.lost, c.queued,
                       opt_us(mean_us), opt_us(to_us(m.p95_delay)), opt_us(to_us(m.max_delay)), m.delivered_bytes);
  }
  return out;
}

}  // namespace hcca::metrics
