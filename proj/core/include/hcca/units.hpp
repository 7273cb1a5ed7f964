#pragma once

#include <chrono>
#include <cstdint>

namespace hcca {

// Simulation time is integer nanoseconds from the start of the run.
using Duration = std::chrono::nanoseconds;
using TimePoint = std::chrono::nanoseconds;

using Bytes = std::int64_t;
using Bits = std::int64_t;
// bits per second
using BitRate = std::int64_t;

inline constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

// Wide intermediate for rate and utilisation arithmetic.
__extension__ typedef __int128 Int128;

// Time needed to clock `bits` onto the air at `rate`, rounded up to the next
// nanosecond. A zero bit count takes zero time.
constexpr Duration airtime(Bits bits, BitRate rate)
{
  const auto num = static_cast<Int128>(bits) * kNanosPerSecond;
  const auto q = num / rate;
  return Duration{static_cast<std::int64_t>(num % rate == 0 ? q : q + 1)};
}

constexpr double to_micros(Duration d) { return static_cast<double>(d.count()) / 1e3; }
constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1e9; }

}  // namespace hcca
