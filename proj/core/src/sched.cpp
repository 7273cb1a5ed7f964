#include "hcca/sched.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "hcca/error.hpp"

namespace hcca::sched {

namespace {

using namespace std::chrono_literals;

struct Preset {
  std::string_view name;
  Tspec tspec;
};

// Jurassic Park 1, MPEG-4 at three quality levels.
constexpr Duration kDelayBound = 80ms;
constexpr Duration kMsi = 40ms;
const std::array<Preset, 3> kPresets{{
    {"jurassic-low", Tspec{150'000, 770, 8154, kDelayBound, kMsi, 11'000'000}},
    {"jurassic-medium", Tspec{270'000, 1300, 8511, kDelayBound, kMsi, 11'000'000}},
    {"jurassic-high", Tspec{770'000, 3800, 16745, kDelayBound, kMsi, 11'000'000}},
}};

std::int64_t ceil_div(Int128 num, Int128 den)
{
  return static_cast<std::int64_t>((num + den - 1) / den);
}

}  // namespace

void Tspec::validate() const
{
  if (mean_data_rate <= 0) throw ConfigError("tspec.mean_data_rate_bps", "must be strictly positive");
  if (nominal_msdu <= 0) throw ConfigError("tspec.nominal_msdu_bytes", "must be strictly positive");
  if (max_msdu <= 0) throw ConfigError("tspec.max_msdu_bytes", "must be strictly positive");
  if (delay_bound.count() <= 0) throw ConfigError("tspec.delay_bound_ms", "must be strictly positive");
  if (max_service_interval.count() <= 0)
    throw ConfigError("tspec.max_service_interval_ms", "must be strictly positive");
  if (phys_rate <= 0) throw ConfigError("tspec.phys_rate_bps", "must be strictly positive");
  if (nominal_msdu > max_msdu) throw ConfigError("tspec.nominal_msdu_bytes", "must not exceed max_msdu_bytes");
  if (max_service_interval > delay_bound)
    throw ConfigError("tspec.max_service_interval_ms", "must not exceed delay_bound_ms");
}

std::optional<Tspec> tspec_preset(std::string_view name)
{
  for (const auto& p : kPresets)
    if (p.name == name) return p.tspec;
  return std::nullopt;
}

std::vector<std::string> tspec_preset_names()
{
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

Duration min_msi(std::span<const Tspec> tspecs)
{
  if (tspecs.empty()) throw Error("min_msi: no traffic streams");
  return std::min_element(tspecs.begin(), tspecs.end(),
                          [](const Tspec& a, const Tspec& b) {
                            return a.max_service_interval < b.max_service_interval;
                          })
      ->max_service_interval;
}

ServiceInterval assign_si(Duration beacon, Duration msi_min)
{
  if (beacon.count() <= 0 || msi_min.count() <= 0)
    throw Error("assign_si: beacon interval and MSI must be positive");
  // beacon / x <= msi  <=>  x >= beacon / msi
  const std::int64_t x = std::max<std::int64_t>(1, ceil_div(beacon.count(), msi_min.count()));
  return ServiceInterval{beacon, x};
}

std::int64_t msdu_count(const ServiceInterval& si, const Tspec& t)
{
  // ceil((beacon / x) * rho / (8 L)) with the SI in nanoseconds.
  const Int128 num = static_cast<Int128>(si.beacon.count()) * t.mean_data_rate;
  const Int128 den = static_cast<Int128>(si.divisor) * kNanosPerSecond * t.nominal_msdu * 8;
  return std::max<std::int64_t>(1, ceil_div(num, den));
}

std::int64_t msdu_count(Duration si, const Tspec& t)
{
  return msdu_count(ServiceInterval{si, 1}, t);
}

Duration reference_txop(const Tspec& t, const ServiceInterval& si, const phy::PhyParams& p,
                        phy::OverheadMode mode)
{
  const std::int64_t n = msdu_count(si, t);
  const Duration nominal = airtime(n * t.nominal_msdu * 8, t.phys_rate) + phy::txop_overhead(n, p, mode);
  const Duration maximum = airtime(t.max_msdu * 8, t.phys_rate) + phy::txop_overhead(1, p, mode);
  return std::max(nominal, maximum);
}

Duration reference_txop(const Tspec& t, Duration si, const phy::PhyParams& p, phy::OverheadMode mode)
{
  return reference_txop(t, ServiceInterval{si, 1}, p, mode);
}

Duration adaptive_txop(Bytes next_size, const Tspec& t, const phy::PhyParams& p)
{
  if (next_size <= 0) throw Error("adaptive_txop: next frame size must be positive");
  return airtime(next_size * 8, t.phys_rate) + phy::txop_overhead(1, p);
}

Duration minimal_txop(const phy::PhyParams& p)
{
  return phy::txop_overhead(1, p) + phy::data_tx_time(0, p);
}

Duration Schedule::total_granted() const
{
  return std::accumulate(grants.begin(), grants.end(), Duration{0},
                         [](Duration acc, const Grant& g) { return acc + g.txop; });
}

double utilisation(const Schedule& s)
{
  if (s.grants.empty()) return 0.0;
  return static_cast<double>(s.total_granted().count()) * static_cast<double>(s.si.divisor) /
         static_cast<double>(s.si.beacon.count());
}

AdmissionState::AdmissionState(Duration beacon_interval, Duration cp_reservation, phy::PhyParams phy,
                               phy::OverheadMode mode)
    : beacon_(beacon_interval), cp_(cp_reservation), phy_(phy), mode_(mode), si_{beacon_interval, 1}
{
  if (beacon_.count() <= 0) throw ConfigError("beacon_interval_ms", "must be strictly positive");
  if (cp_.count() < 0 || cp_ >= beacon_)
    throw ConfigError("cp_reservation_ms", "must lie in [0, beacon_interval)");
}

Schedule AdmissionState::schedule() const
{
  Schedule s{si_, {}};
  for (const auto& f : admitted_) s.grants.push_back({f.flow, f.txop});
  return s;
}

AdmissionDecision admit(const AdmissionState& state, FlowId flow, const Tspec& candidate)
{
  candidate.validate();

  std::vector<Tspec> all;
  all.reserve(state.admitted_.size() + 1);
  for (const auto& f : state.admitted_) all.push_back(f.tspec);
  all.push_back(candidate);

  const ServiceInterval si = assign_si(state.beacon_, min_msi(all));

  AdmissionState next = state;
  next.si_ = si;
  for (auto& f : next.admitted_) f.txop = reference_txop(f.tspec, si, state.phy_, state.mode_);
  const Duration cand_txop = reference_txop(candidate, si, state.phy_, state.mode_);

  Int128 sum = cand_txop.count();
  for (const auto& f : next.admitted_) sum += f.txop.count();

  // sum / (T / x) <= (T - T_CP) / T   <=>   sum * x * T <= T * (T - T_CP)
  const Int128 T = state.beacon_.count();
  const bool fits = sum * si.divisor * T <= T * (T - state.cp_.count());

  if (!fits) {
    const double u = static_cast<double>(sum) * static_cast<double>(si.divisor) / static_cast<double>(T);
    return AdmissionDecision{false, "utilisation " + std::to_string(u) + " exceeds bound",
                             state, state.schedule()};
  }
  next.admitted_.push_back({flow, candidate, cand_txop});
  Schedule sched = next.schedule();
  return AdmissionDecision{true, {}, std::move(next), std::move(sched)};
}

Schedule schedule_all(std::span<const Tspec> tspecs, Duration beacon, const phy::PhyParams& p,
                      phy::OverheadMode mode)
{
  const ServiceInterval si = assign_si(beacon, min_msi(tspecs));
  Schedule s{si, {}};
  FlowId id = 0;
  for (const auto& t : tspecs) s.grants.push_back({id++, reference_txop(t, si, p, mode)});
  return s;
}

}  // namespace hcca::sched
