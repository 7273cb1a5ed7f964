// hccasim: trace-driven HCCA polling simulator.
//
//   hccasim simulate    --config s.json [--set k=v ...] [--out DIR]
//   hccasim sweep       --config s.json [--stations 1..12] [--schedulers reference,adaptive]
//   hccasim trace-stats trace.txt
//   hccasim validate    --config s.json [--set k=v ...]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hcca/engine.hpp"
#include "hcca/error.hpp"
#include "hcca/metrics.hpp"
#include "hcca/scenario.hpp"
#include "hcca/sweep.hpp"
#include "hcca/traffic.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  bool quiet = false;
};

class IoError : public hcca::Error {
 public:
  using hcca::Error::Error;
};

hcca::ScenarioConfig load(const CommonOptions& o)
{
  std::vector<hcca::Override> overrides;
  for (const auto& s : o.sets) overrides.push_back(hcca::parse_override(s));
  auto cfg = hcca::load_scenario(o.config.empty() ? std::nullopt : std::optional<std::string>(o.config), overrides);
  if (!o.out.empty()) cfg.out_dir = o.out;
  return cfg;
}

void warn_station_count(std::size_t n, bool quiet)
{
  if (n > 12 && !quiet)
    std::cerr << fmt::format("warning: {} stations is beyond the 1..12 range of the reference experiments\n", n);
}

std::filesystem::path prepare_out_dir(const std::string& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("out: cannot create directory '" + dir + "'");
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary);
  f << text;
  f.close();
  if (!f) throw IoError("out: cannot write '" + path.string() + "'");
}

int cmd_simulate(const CommonOptions& o)
{
  const auto cfg = load(o);
  warn_station_count(cfg.stations.size(), o.quiet);
  const auto report = hcca::sim::run(cfg);
  const auto dir = prepare_out_dir(cfg.out_dir);

  const std::vector<hcca::metrics::SummaryRow> rows{hcca::metrics::summarize(report)};
  const auto summary = hcca::metrics::summary_csv(rows);
  write_file(dir / "packets.csv", hcca::sim::packet_log_csv(report.packets));
  write_file(dir / "flows.csv", hcca::metrics::flow_csv(report));
  write_file(dir / "summary.csv", summary);
  if (!o.quiet) {
    std::cout << summary;
    if (report.overruns > 0) std::cerr << fmt::format("note: {} scheduling overrun(s) recorded\n", report.overruns);
  }
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& stations, const std::string& schedulers, unsigned threads)
{
  std::vector<hcca::Override> extra;
  CommonOptions opts = o;
  if (!stations.empty()) opts.sets.push_back("sweep.stations=\"" + stations + "\"");
  if (!schedulers.empty()) opts.sets.push_back("sweep.schedulers=\"" + schedulers + "\"");
  const auto cfg = load(opts);
  warn_station_count(cfg.sweep_stations.second, o.quiet);

  const auto reports = hcca::run_sweep(cfg, cfg.sweep_stations, cfg.sweep_schedulers, threads);
  const auto rows = hcca::metrics::summarize(reports);
  const auto summary = hcca::metrics::summary_csv(rows);
  const auto dir = prepare_out_dir(cfg.out_dir);
  write_file(dir / "summary.csv", summary);
  if (!o.quiet) std::cout << summary;
  return 0;
}

int cmd_trace_stats(const std::string& path, double frame_interval_ms)
{
  const auto interval = hcca::Duration{static_cast<std::int64_t>(frame_interval_ms * 1e6)};
  const auto trace = hcca::traffic::load_trace(path, interval);
  const auto stats = hcca::traffic::trace_stats(trace);
  std::cout << hcca::traffic::trace_stats_csv_header() << '\n'
            << hcca::traffic::trace_stats_csv_row(std::filesystem::path(path).filename().string(), stats) << '\n';
  return 0;
}

int cmd_validate(const CommonOptions& o)
{
  const auto cfg = load(o);
  warn_station_count(cfg.stations.size(), o.quiet);
  if (!o.quiet)
    std::cout << fmt::format("ok: {} station(s), scheduler={}, admission={}, duration={}s\n", cfg.stations.size(),
                             hcca::to_string(cfg.scheduler), cfg.admission ? "on" : "off",
                             hcca::to_seconds(cfg.duration));
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_out)
{
  cmd->add_option("--config", o.config, "Scenario config file (JSON)");
  cmd->add_option("--set", o.sets, "Override a config value, key=value (dotted keys, repeatable)");
  if (with_out) cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--quiet", o.quiet, "Suppress console output");
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Trace-driven IEEE 802.11e HCCA scheduler simulator"};
  app.require_subcommand(1);

  CommonOptions sim_opts, sweep_opts, val_opts;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write packet/flow/summary CSVs");
  add_common(simulate, sim_opts, true);

  std::string stations, schedulers;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a (scheduler x station count) grid and write summary.csv");
  add_common(sweep, sweep_opts, true);
  sweep->add_option("--stations", stations, "Station range A..B");
  sweep->add_option("--schedulers", schedulers, "Comma-separated schedulers (reference,adaptive)");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string trace_path;
  double frame_interval_ms = 40.0;
  bool ts_quiet = false;
  auto* trace_stats = app.add_subcommand("trace-stats", "Print frame statistics of a video trace as CSV");
  trace_stats->add_option("trace", trace_path, "Trace file")->required();
  trace_stats->add_option("--frame-interval-ms", frame_interval_ms, "Frame interval")->check(CLI::PositiveNumber);
  trace_stats->add_flag("--quiet", ts_quiet, "Accepted for symmetry");

  auto* validate = app.add_subcommand("validate", "Check a scenario config without running it");
  add_common(validate, val_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim_opts);
    if (*sweep) return cmd_sweep(sweep_opts, stations, schedulers, threads);
    if (*trace_stats) return cmd_trace_stats(trace_path, frame_interval_ms);
    if (*validate) return cmd_validate(val_opts);
  } catch (const hcca::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const hcca::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
