#pragma once

#include <cstdint>

#include "hcca/units.hpp"

namespace hcca {

// One MSDU in the per-packet log. recv_ts is the end of the data frame's air
// time at the QAP; it is -1 for lost frames.
struct PacketRecord {
  std::uint32_t flow = 0;
  std::int64_t seq = 0;
  TimePoint gen_ts{0};
  TimePoint recv_ts{-1};
  Bytes size = 0;
  bool lost = false;

  Duration delay() const { return recv_ts - gen_ts; }

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

}  // namespace hcca
