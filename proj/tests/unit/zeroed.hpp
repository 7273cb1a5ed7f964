#pragma once

#include "hcca/phy.hpp"

// PHY with every overhead constant zeroed, so TXOPs reduce to payload time.
inline hcca::phy::PhyParams zero_overhead_phy()
{
  hcca::phy::PhyParams p;
  p.sifs = hcca::Duration{0};
  p.preamble_len = 0;
  p.plcp_header_len = 0;
  p.mac_header = 0;
  p.ack_frame = 0;
  p.poll_frame = 0;
  p.beacon_frame = 0;
  return p;
}
