#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcca/phy.hpp"
#include "hcca/units.hpp"

namespace hcca::sched {

using FlowId = std::uint32_t;

// Traffic specification negotiated at stream setup.
struct Tspec {
  BitRate mean_data_rate = 0;     // rho
  Bytes nominal_msdu = 0;         // L
  Bytes max_msdu = 0;             // M
  Duration delay_bound{0};        // D
  Duration max_service_interval{0};  // MSI
  BitRate phys_rate = 0;          // R

  // Throws hcca::ConfigError on non-positive fields, L > M or MSI > D.
  void validate() const;

  friend bool operator==(const Tspec&, const Tspec&) = default;
};

// Named presets for the three Jurassic Park 1 encodings:
// "jurassic-low", "jurassic-medium", "jurassic-high".
std::optional<Tspec> tspec_preset(std::string_view name);
std::vector<std::string> tspec_preset_names();

// A service interval that is an exact submultiple of the beacon interval.
// The SI itself is beacon/divisor, which need not be a whole number of
// nanoseconds; `si()` floors it, and boundaries are placed with
// `boundary(k)` so they stay aligned to beacons.
struct ServiceInterval {
  Duration beacon{0};
  std::int64_t divisor = 1;

  Duration si() const { return Duration{beacon.count() / divisor}; }
  TimePoint boundary(std::int64_t k) const
  {
    return TimePoint{(k / divisor) * beacon.count() + ((k % divisor) * beacon.count()) / divisor};
  }
  bool is_beacon(std::int64_t k) const { return k % divisor == 0; }

  friend bool operator==(const ServiceInterval&, const ServiceInterval&) = default;
};

// Minimum MSI over the given TSPECs. Throws hcca::Error on an empty list.
Duration min_msi(std::span<const Tspec> tspecs);

// Smallest divisor x >= 1 such that beacon/x <= msi_min.
ServiceInterval assign_si(Duration beacon, Duration msi_min);

// Number of MSDUs expected per SI at the mean rate, ceil(SI*rho / 8L),
// floored at 1.
std::int64_t msdu_count(const ServiceInterval& si, const Tspec& t);
std::int64_t msdu_count(Duration si, const Tspec& t);

// Reference HCCA TXOP:
//   max(N*L*8/R + O(N), M*8/R + O(1))
Duration reference_txop(const Tspec& t, const ServiceInterval& si, const phy::PhyParams& p,
                        phy::OverheadMode mode = phy::OverheadMode::per_msdu);
Duration reference_txop(const Tspec& t, Duration si, const phy::PhyParams& p,
                        phy::OverheadMode mode = phy::OverheadMode::per_msdu);

// Adaptive TXOP for a reported next-frame size: one MSDU's payload time at R
// plus O(1). Throws hcca::Error when next_size is 0; use minimal_txop then.
Duration adaptive_txop(Bytes next_size, const Tspec& t, const phy::PhyParams& p);

// Grant given when a station reported that nothing is pending: enough to
// send a QoS Null carrying a fresh queue-size report.
Duration minimal_txop(const phy::PhyParams& p);

struct Grant {
  FlowId flow = 0;
  Duration txop{0};
};

struct Schedule {
  ServiceInterval si;
  // Polling order, FIFO by admission.
  std::vector<Grant> grants;

  Duration total_granted() const;
};

struct AdmittedFlow {
  FlowId flow = 0;
  Tspec tspec;
  Duration txop{0};
};

struct AdmissionDecision;

// HC-side admission bookkeeping. The standing invariant is
//   sum(TXOP_i) / SI <= (T - T_CP) / T
// evaluated exactly in integer arithmetic.
class AdmissionState {
 public:
  AdmissionState(Duration beacon_interval, Duration cp_reservation, phy::PhyParams phy,
                 phy::OverheadMode mode = phy::OverheadMode::per_msdu);

  const std::vector<AdmittedFlow>& admitted() const { return admitted_; }
  Duration beacon_interval() const { return beacon_; }
  Duration cp_reservation() const { return cp_; }
  const phy::PhyParams& phy() const { return phy_; }
  phy::OverheadMode overhead_mode() const { return mode_; }

  // Current schedule; empty grants and a one-beacon SI when nothing is
  // admitted.
  Schedule schedule() const;

 private:
  friend AdmissionDecision admit(const AdmissionState&, FlowId, const Tspec&);

  Duration beacon_;
  Duration cp_;
  phy::PhyParams phy_;
  phy::OverheadMode mode_;
  ServiceInterval si_;
  std::vector<AdmittedFlow> admitted_;
};

struct AdmissionDecision {
  bool accepted = false;
  std::string reason;  // empty when accepted
  // Updated state on accept; unchanged copy on reject.
  AdmissionState state;
  Schedule schedule;
};

// Recomputes SI over admitted + candidate, recomputes every admitted TXOP at
// the new SI and accepts iff the utilisation bound still holds. A reject is a
// value; a malformed Tspec throws hcca::ConfigError.
AdmissionDecision admit(const AdmissionState& state, FlowId flow, const Tspec& candidate);

// Utilisation sum(TXOP_i)/SI for a schedule, for reporting.
double utilisation(const Schedule& s);

// Builds a schedule over all given flows without admission control, in the
// given order.
Schedule schedule_all(std::span<const Tspec> tspecs, Duration beacon, const phy::PhyParams& p,
                      phy::OverheadMode mode = phy::OverheadMode::per_msdu);

}  // namespace hcca::sched
