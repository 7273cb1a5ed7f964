#pragma once

// From-scratch recomputation of SI assignment, MSDU counts, reference TXOPs
// and the admission inequality. Deliberately shares no code with the
// library: plain integers, a linear scan for the SI divisor and its own
// rounding helpers.

#include <cstdint>
#include <vector>

namespace oracle {

__extension__ typedef unsigned __int128 U128;

struct Phy {
  std::int64_t sifs_ns, preamble_bits, plcp_bits, mac_header_bytes, data_rate, basic_rate, ack_bytes, poll_bytes;
};

struct Flow {
  std::int64_t rho, L, M, msi_ns, R;
};

inline std::int64_t up(U128 num, U128 den)
{
  return static_cast<std::int64_t>(num / den + (num % den ? 1 : 0));
}

inline std::int64_t overhead(const Phy& p, std::int64_t n, bool lumped)
{
  const std::int64_t k = lumped ? 1 : n;
  const std::int64_t poll = up(U128(p.preamble_bits + p.plcp_bits + 8 * p.poll_bytes) * 1000000000u, p.basic_rate);
  const std::int64_t ack = up(U128(p.preamble_bits + p.plcp_bits + 8 * p.ack_bytes) * 1000000000u, p.basic_rate);
  const std::int64_t hdr = up(U128(p.preamble_bits + p.plcp_bits) * 1000000000u, p.basic_rate) +
                           up(U128(8 * p.mac_header_bytes) * 1000000000u, p.data_rate);
  std::int64_t total = poll + p.sifs_ns;
  for (std::int64_t i = 0; i < k; ++i) total += hdr + p.sifs_ns + ack + p.sifs_ns;
  return total;
}

struct Si {
  std::int64_t beacon_ns, x;
};

inline Si service_interval(std::int64_t beacon_ns, const std::vector<Flow>& flows)
{
  std::int64_t msi = flows.front().msi_ns;
  for (const auto& f : flows)
    if (f.msi_ns < msi) msi = f.msi_ns;
  std::int64_t x = 1;
  while (beacon_ns > x * msi) ++x;  // beacon / x > msi
  return {beacon_ns, x};
}

inline std::int64_t txop(const Phy& p, const Flow& f, Si si, bool lumped)
{
  std::int64_t n = up(U128(si.beacon_ns) * U128(f.rho), U128(si.x) * 1000000000u * U128(f.L) * 8u);
  if (n < 1) n = 1;
  const std::int64_t a = up(U128(n * f.L * 8) * 1000000000u, f.R) + overhead(p, n, lumped);
  const std::int64_t b = up(U128(f.M * 8) * 1000000000u, f.R) + overhead(p, 1, lumped);
  return a > b ? a : b;
}

// Sequential admission: each candidate is tested against the flows accepted
// so far, recomputing everything at the SI of the enlarged set.
inline std::vector<bool> admit_all(const Phy& p, std::int64_t beacon_ns, std::int64_t cp_ns,
                                   const std::vector<Flow>& candidates, bool lumped)
{
  std::vector<bool> out;
  std::vector<Flow> accepted;
  for (const auto& c : candidates) {
    std::vector<Flow> set = accepted;
    set.push_back(c);
    const Si si = service_interval(beacon_ns, set);
    U128 sum = 0;
    for (const auto& f : set) sum += static_cast<U128>(txop(p, f, si, lumped));
    const bool ok = sum * U128(si.x) * U128(beacon_ns) <= U128(beacon_ns) * U128(beacon_ns - cp_ns);
    out.push_back(ok);
    if (ok) accepted.push_back(c);
  }
  return out;
}

}  // namespace oracle
