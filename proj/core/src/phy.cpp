#include "hcca/phy.hpp"

#include "hcca/error.hpp"

namespace hcca::phy {

void PhyParams::validate() const
{
  auto positive = [](bool ok, const char* field) {
    if (!ok) throw ConfigError(std::string("phy.") + field, "must be strictly positive");
  };
  positive(sifs.count() > 0, "sifs_us");
  positive(pifs.count() > 0, "pifs_us");
  positive(slot_time.count() > 0, "slot_time_us");
  positive(preamble_len > 0, "preamble_bits");
  positive(plcp_header_len > 0, "plcp_header_bits");
  positive(mac_header > 0, "mac_header_bytes");
  positive(data_rate > 0, "data_rate_bps");
  positive(basic_rate > 0, "basic_rate_bps");
  positive(ack_frame > 0, "ack_frame_bytes");
  positive(poll_frame > 0, "poll_frame_bytes");
  if (beacon_frame < 0) throw ConfigError("phy.beacon_frame_bytes", "must not be negative");
  if (basic_rate > data_rate) throw ConfigError("phy.basic_rate_bps", "must not exceed data_rate_bps");
}

Duration phy_header_time(const PhyParams& p)
{
  return airtime(p.preamble_len + p.plcp_header_len, p.basic_rate);
}

Duration mac_header_time(const PhyParams& p)
{
  return airtime(p.mac_header * 8, p.data_rate);
}

Duration data_tx_time(Bytes payload, const PhyParams& p)
{
  return phy_header_time(p) + airtime((p.mac_header + payload) * 8, p.data_rate);
}

Duration ctrl_tx_time(Bytes frame, const PhyParams& p)
{
  return airtime(p.preamble_len + p.plcp_header_len + frame * 8, p.basic_rate);
}

Duration exchange_time(Bytes payload, const PhyParams& p)
{
  return data_tx_time(payload, p) + p.sifs + ctrl_tx_time(p.ack_frame, p) + p.sifs;
}

Duration txop_overhead(std::int64_t n_msdus, const PhyParams& p)
{
  if (n_msdus < 1) throw Error("txop_overhead: MSDU count must be at least 1");
  const Duration per_msdu =
      phy_header_time(p) + mac_header_time(p) + p.sifs + ctrl_tx_time(p.ack_frame, p) + p.sifs;
  return ctrl_tx_time(p.poll_frame, p) + p.sifs + n_msdus * per_msdu;
}

Duration txop_overhead(std::int64_t n_msdus, const PhyParams& p, OverheadMode mode)
{
  return txop_overhead(mode == OverheadMode::paper_literal ? std::min<std::int64_t>(n_msdus, 1) : n_msdus, p);
}

}  // namespace hcca::phy
