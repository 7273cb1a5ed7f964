#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hcca/phy.hpp"
#include "hcca/sched.hpp"
#include "hcca/traffic.hpp"
#include "hcca/units.hpp"

namespace hcca {

enum class SchedulerKind { reference, adaptive };
enum class RejectPolicy { abort, ignore };

const char* to_string(SchedulerKind k);
std::optional<SchedulerKind> parse_scheduler(const std::string& s);

struct SyntheticTraffic {
  std::string gop = "IBBPBBPBBPBB";
  traffic::GopSizes sizes{12500, 4500, 2500};
  double jitter = 0.25;
  // 0 sizes the trace to cover the active window.
  std::size_t frames = 0;
};

// Either a loaded trace file or a synthetic generator description.
struct TrafficSpec {
  std::shared_ptr<const traffic::VideoTrace> trace;
  std::string trace_path;
  SyntheticTraffic synthetic;

  bool is_file() const { return trace != nullptr; }
};

struct StationSpec {
  std::string tspec_name = "jurassic-high";
  sched::Tspec tspec = *sched::tspec_preset("jurassic-high");
  TrafficSpec traffic;
};

struct ScenarioConfig {
  phy::PhyParams phy;
  Duration beacon_interval{120'000'000};
  Duration cp_reservation{0};
  SchedulerKind scheduler = SchedulerKind::adaptive;
  bool admission = false;
  RejectPolicy reject_policy = RejectPolicy::abort;
  std::vector<StationSpec> stations{StationSpec{}};
  Duration traffic_start{20'000'000'000};
  Duration duration{50'000'000'000};
  Duration frame_interval = traffic::kDefaultFrameInterval;
  double loss_p = 0.0;
  bool qs_exact = false;
  phy::OverheadMode overhead_mode = phy::OverheadMode::per_msdu;
  bool paper_literal_throughput = false;
  // Start each station at a seeded random offset into its trace.
  bool stagger = true;
  // Hand unused TXOP time back to the HC instead of leaving it idle.
  bool reclaim_unused_txop = false;
  std::uint64_t seed = 1;

  // CLI-level settings carried with the scenario.
  std::string out_dir = "out";
  std::pair<std::size_t, std::size_t> sweep_stations{1, 12};
  std::vector<SchedulerKind> sweep_schedulers{SchedulerKind::reference, SchedulerKind::adaptive};

  // Throws hcca::ConfigError naming the offending field.
  void validate() const;

  // Label for the summary "quality" column: the shared preset name, or
  // "mixed".
  std::string quality() const;

  // Same scenario with n stations, each a copy of the first station spec.
  ScenarioConfig with_stations(std::size_t n) const;
};

// A `--set key=value` override. Keys are dotted paths into the config
// document; values are parsed as JSON and fall back to a plain string.
struct Override {
  std::string key;
  std::string value;
};

Override parse_override(const std::string& kv);

// Builds a scenario from an optional JSON config file plus overrides. Trace
// paths are resolved relative to the config file and loaded eagerly.
ScenarioConfig load_scenario(const std::optional<std::string>& path,
                             const std::vector<Override>& overrides = {});
ScenarioConfig load_scenario_text(const std::string& json_text,
                                  const std::vector<Override>& overrides = {},
                                  const std::string& base_dir = ".");

// Parses "A..B" or a single number.
std::pair<std::size_t, std::size_t> parse_station_range(const std::string& s);

// Canonical text of everything except station count, scheduler and seed;
// equal for cells of one sweep.
std::string template_key(const ScenarioConfig& c);

}  // namespace hcca
