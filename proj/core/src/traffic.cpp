#include "hcca/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "hcca/error.hpp"
#include "hcca/random.hpp"

namespace hcca::traffic {

namespace {

std::optional<FrameType> parse_type(std::string_view s)
{
  if (s == "I") return FrameType::I;
  if (s == "P") return FrameType::P;
  if (s == "B") return FrameType::B;
  return std::nullopt;
}

template <typename T>
bool parse_number(const std::string& tok, T& out)
{
  std::istringstream is(tok);
  is.imbue(std::locale::classic());
  is >> out;
  return !is.fail() && is.eof();
}

}  // namespace

VideoTrace parse_trace(std::istream& in, Duration frame_interval)
{
  VideoTrace trace;
  trace.frame_interval = frame_interval;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream is(line);
    std::vector<std::string> cols;
    for (std::string tok; is >> tok;) cols.push_back(tok);
    if (cols.size() != 4)
      throw ParseError(lineno, fmt::format("expected 4 columns (seq type time_ms size_bytes), got {}",
                                           cols.size()));

    FrameRecord r;
    double time_ms = 0;
    if (!parse_number(cols[0], r.seq) || r.seq < 0)
      throw ParseError(lineno, "bad frame sequence '" + cols[0] + "'");
    const auto type = parse_type(cols[1]);
    if (!type) throw ParseError(lineno, "unknown frame type '" + cols[1] + "'");
    r.type = *type;
    if (!parse_number(cols[2], time_ms) || !std::isfinite(time_ms))
      throw ParseError(lineno, "bad frame time '" + cols[2] + "'");
    r.display_time = Duration{std::llround(time_ms * 1e6)};
    if (!parse_number(cols[3], r.size) || r.size <= 0)
      throw ParseError(lineno, "bad frame size '" + cols[3] + "'");
    trace.records.push_back(r);
  }
  if (trace.records.empty()) throw ParseError(0, "trace contains no frames");

  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const FrameRecord& a, const FrameRecord& b) { return a.seq < b.seq; });
  const auto dup = std::adjacent_find(trace.records.begin(), trace.records.end(),
                                      [](const FrameRecord& a, const FrameRecord& b) { return a.seq == b.seq; });
  if (dup != trace.records.end()) throw ParseError(0, fmt::format("duplicate frame sequence {}", dup->seq));
  return trace;
}

VideoTrace load_trace(const std::string& path, Duration frame_interval)
{
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  try {
    return parse_trace(in, frame_interval);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

void write_trace(std::ostream& out, const VideoTrace& trace)
{
  for (const auto& r : trace.records) {
    const double ms = static_cast<double>(r.display_time.count()) / 1e6;
    out << fmt::format("{} {} {} {}\n", r.seq, static_cast<char>(r.type), ms, r.size);
  }
}

TraceStats trace_stats(const VideoTrace& trace)
{
  if (trace.records.empty()) throw Error("trace_stats: empty trace");
  if (trace.frame_interval.count() <= 0) throw Error("trace_stats: frame interval must be positive");

  Bytes total = 0;
  Bytes peak = 0;
  for (const auto& r : trace.records) {
    total += r.size;
    peak = std::max(peak, r.size);
  }
  const double secs = to_seconds(trace.frame_interval);
  TraceStats s;
  s.mean_size = static_cast<double>(total) / static_cast<double>(trace.records.size());
  s.peak_size = peak;
  s.mean_bit_rate = s.mean_size * 8.0 / secs;
  s.peak_bit_rate = static_cast<double>(peak) * 8.0 / secs;
  s.peak_to_mean = s.peak_bit_rate / s.mean_bit_rate;
  return s;
}

std::string trace_stats_csv_header()
{
  return "trace,mean_size_bytes,peak_size_bytes,mean_bit_rate_bps,peak_bit_rate_bps,peak_to_mean";
}

std::string trace_stats_csv_row(std::string_view name, const TraceStats& s)
{
  return fmt::format("{},{:.2f},{},{:.1f},{:.1f},{:.4f}", name, s.mean_size, s.peak_size, s.mean_bit_rate,
                     s.peak_bit_rate, s.peak_to_mean);
}

std::vector<Arrival> arrivals(const VideoTrace& trace, TimePoint start)
{
  if (start.count() < 0) throw Error("arrivals: start time must not be negative");
  std::vector<Arrival> out;
  out.reserve(trace.records.size());
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    out.push_back({start + static_cast<std::int64_t>(k) * trace.frame_interval, r.size, r.seq});
  }
  return out;
}

VideoTrace synth_trace(std::string_view gop_pattern, GopSizes base, double jitter, std::size_t n_frames,
                       std::uint64_t seed, Duration frame_interval)
{
  if (gop_pattern.empty()) throw Error("synth_trace: empty GoP pattern");
  if (n_frames == 0) throw Error("synth_trace: frame count must be positive");
  std::vector<FrameType> pattern;
  for (char c : gop_pattern) {
    const auto t = parse_type(std::string_view(&c, 1));
    if (!t) throw Error(fmt::format("synth_trace: invalid GoP pattern character '{}'", c));
    pattern.push_back(*t);
  }
  if (!(jitter >= 0.0 && jitter < 1.0)) throw Error("synth_trace: jitter must lie in [0, 1)");
  if (base.i <= 0 || base.p <= 0 || base.b <= 0) throw Error("synth_trace: base sizes must be positive");

  std::mt19937_64 rng(seed);
  VideoTrace trace;
  trace.frame_interval = frame_interval;
  trace.records.reserve(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const FrameType t = pattern[k % pattern.size()];
    const Bytes b = t == FrameType::I ? base.i : t == FrameType::P ? base.p : base.b;
    const double u = 2.0 * uniform01(rng) - 1.0;
    const Bytes size = std::max<Bytes>(1, std::llround(static_cast<double>(b) * (1.0 + u * jitter)));
    trace.records.push_back({static_cast<std::int64_t>(k), t,
                             static_cast<std::int64_t>(k) * frame_interval, size});
  }
  return trace;
}

}  // namespace hcca::traffic
