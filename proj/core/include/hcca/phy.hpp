#pragma once

#include "hcca/units.hpp"

namespace hcca::phy {

// PHY/MAC timing constants. Defaults are the 802.11b long-preamble values the
// evaluation uses; ack/poll/beacon frame sizes are conventional frame sizes.
struct PhyParams {
  Duration sifs{10'000};
  Duration pifs{30'000};
  Duration slot_time{20'000};
  Bits preamble_len = 144;
  Bits plcp_header_len = 48;
  Bytes mac_header = 36;
  BitRate data_rate = 11'000'000;
  BitRate basic_rate = 1'000'000;
  Bytes ack_frame = 14;
  // QoS CF-Poll sent as a bare MAC header.
  Bytes poll_frame = 36;
  Bytes beacon_frame = 56;

  // Throws hcca::ConfigError naming the first field that breaks the
  // positivity and basic_rate <= data_rate constraints.
  void validate() const;

  friend bool operator==(const PhyParams&, const PhyParams&) = default;
};

// How the per-TXOP overhead O scales with the MSDU count.
enum class OverheadMode {
  per_msdu,      // poll once, then headers/IFS/ACK for every MSDU
  paper_literal  // a single lumped O(1) regardless of MSDU count
};

// PHY preamble + PLCP header, always at the basic rate.
Duration phy_header_time(const PhyParams& p);

// MAC header at the data rate.
Duration mac_header_time(const PhyParams& p);

// Data frame air time: PHY header at basic rate, MAC header + payload at the
// data rate. Each rate division rounds up separately.
Duration data_tx_time(Bytes payload, const PhyParams& p);

// Control frame (poll, ACK, beacon) sent wholly at the basic rate.
Duration ctrl_tx_time(Bytes frame, const PhyParams& p);

// One polled data exchange: DATA + SIFS + ACK + SIFS.
Duration exchange_time(Bytes payload, const PhyParams& p);

// O(n): poll + SIFS once, then n x (PHY hdr + MAC hdr + SIFS + ACK + SIFS).
// Throws hcca::Error when n_msdus < 1.
Duration txop_overhead(std::int64_t n_msdus, const PhyParams& p);

Duration txop_overhead(std::int64_t n_msdus, const PhyParams& p, OverheadMode mode);

}  // namespace hcca::phy
