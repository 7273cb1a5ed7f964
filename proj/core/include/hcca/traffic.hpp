#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hcca/units.hpp"

namespace hcca::traffic {

enum class FrameType : char { I = 'I', P = 'P', B = 'B' };

struct FrameRecord {
  std::int64_t seq = 0;
  FrameType type = FrameType::I;
  Duration display_time{0};  // preserved from the trace, not used for timing
  Bytes size = 0;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

inline constexpr Duration kDefaultFrameInterval{40'000'000};

// Frames in coding order (ascending seq). Non-empty once constructed through
// parse_trace or synth_trace.
struct VideoTrace {
  std::vector<FrameRecord> records;
  Duration frame_interval = kDefaultFrameInterval;

  friend bool operator==(const VideoTrace&, const VideoTrace&) = default;
};

struct TraceStats {
  double mean_size = 0;
  Bytes peak_size = 0;
  double mean_bit_rate = 0;
  double peak_bit_rate = 0;
  double peak_to_mean = 0;
};

struct Arrival {
  TimePoint time{0};
  Bytes size = 0;
  std::int64_t seq = 0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

// Parses whitespace-separated `seq type display_time_ms size_bytes` lines.
// Blank lines and lines starting with '#' are skipped. Records come back
// sorted by seq. Throws hcca::ParseError with the offending line number.
VideoTrace parse_trace(std::istream& in, Duration frame_interval = kDefaultFrameInterval);
VideoTrace load_trace(const std::string& path, Duration frame_interval = kDefaultFrameInterval);

// Inverse of parse_trace.
void write_trace(std::ostream& out, const VideoTrace& trace);

// Throws hcca::Error on an empty trace.
TraceStats trace_stats(const VideoTrace& trace);

// CSV header and row: trace,mean_size_bytes,peak_size_bytes,
// mean_bit_rate_bps,peak_bit_rate_bps,peak_to_mean
std::string trace_stats_csv_header();
std::string trace_stats_csv_row(std::string_view name, const TraceStats& stats);

// Frame k (coding order) arrives at start + k*frame_interval as one MSDU.
std::vector<Arrival> arrivals(const VideoTrace& trace, TimePoint start);

struct GopSizes {
  Bytes i = 0;
  Bytes p = 0;
  Bytes b = 0;
};

// Synthetic GoP-structured VBR trace. Frame k takes the pattern's type at
// k mod len and size round(base * (1 + u*jitter)), u uniform in [-1, 1],
// floored at one byte. Deterministic for a given seed.
VideoTrace synth_trace(std::string_view gop_pattern, GopSizes base, double jitter,
                       std::size_t n_frames, std::uint64_t seed,
                       Duration frame_interval = kDefaultFrameInterval);

}  // namespace hcca::traffic
