#include <doctest.h>

#include <fstream>
#include <string>

#include "hcca/error.hpp"
#include "hcca/scenario.hpp"
#include "hcca/sweep.hpp"

using namespace hcca;
using namespace std::chrono_literals;

namespace {

std::string field_of(const std::string& text, const std::vector<Override>& ov = {})
{
  try {
    load_scenario_text(text, ov, HCCA_DATA_DIR);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults")
{
  const auto c = load_scenario_text("");
  CHECK(c.stations.size() == 1);
  CHECK(c.scheduler == SchedulerKind::adaptive);
  CHECK(c.beacon_interval == 120ms);
  CHECK(c.duration == 50s);
  CHECK(c.traffic_start == 20s);
  CHECK(c.phy == phy::PhyParams{});
  CHECK(c.quality() == "jurassic-high");
}

TEST_CASE("full document")
{
  const auto c = load_scenario_text(R"({
    "phy": {"sifs_us": 16, "data_rate_bps": 5500000},
    "beacon_interval_ms": 100,
    "scheduler": "reference",
    "admission": "on",
    "reject_policy": "ignore",
    "tspec": {"preset": "jurassic-low", "max_msdu_bytes": 9000},
    "traffic": {"synthetic": {"gop": "IPP", "sizes": [5000, 2000, 1000], "jitter": 0.1}},
    "stations": 3,
    "duration_s": 10, "traffic_start_s": 2.5,
    "loss_p": 0.05, "qs_exact": true, "overhead_mode": "paper_literal",
    "seed": 42,
    "sweep": {"stations": "2..5", "schedulers": ["adaptive"]}
  })");
  CHECK(c.phy.sifs == 16us);
  CHECK(c.phy.data_rate == 5'500'000);
  CHECK(c.beacon_interval == 100ms);
  CHECK(c.scheduler == SchedulerKind::reference);
  CHECK(c.admission);
  CHECK(c.reject_policy == RejectPolicy::ignore);
  REQUIRE(c.stations.size() == 3);
  CHECK(c.stations[2].tspec.max_msdu == 9000);
  CHECK(c.stations[2].tspec.nominal_msdu == sched::tspec_preset("jurassic-low")->nominal_msdu);
  CHECK(c.stations[1].traffic.synthetic.gop == "IPP");
  CHECK(c.traffic_start == 2500ms);
  CHECK(c.qs_exact);
  CHECK(c.overhead_mode == phy::OverheadMode::paper_literal);
  CHECK(c.seed == 42);
  CHECK(c.sweep_stations == std::pair<std::size_t, std::size_t>{2, 5});
  CHECK(c.sweep_schedulers == std::vector<SchedulerKind>{SchedulerKind::adaptive});
}

TEST_CASE("per-station list and trace files")
{
  const auto c = load_scenario_text(R"({
    "traffic": {"trace": "table1_fragment.trace"},
    "stations": [{}, {"tspec": "jurassic-medium"}]
  })", {}, HCCA_DATA_DIR);
  REQUIRE(c.stations.size() == 2);
  CHECK(c.stations[0].traffic.is_file());
  CHECK(c.stations[0].traffic.trace->records.size() == 12);
  CHECK(c.stations[1].tspec_name == "jurassic-medium");
  CHECK(c.quality() == "mixed");
}

TEST_CASE("overrides")
{
  const auto c = load_scenario_text(R"({"stations": 2})",
                                    {parse_override("stations=5"), parse_override("scheduler=reference"),
                                     parse_override("phy.sifs_us=20"), parse_override("tspec=jurassic-low"),
                                     parse_override("tspec.mean_data_rate_bps=100000")});
  CHECK(c.stations.size() == 5);
  CHECK(c.scheduler == SchedulerKind::reference);
  CHECK(c.phy.sifs == 20us);
  CHECK(c.stations[0].tspec_name == "custom");
  CHECK(c.stations[0].tspec.max_msdu == sched::tspec_preset("jurassic-low")->max_msdu);
  CHECK(c.stations[0].tspec.mean_data_rate == 100'000);
  CHECK_THROWS_AS(parse_override("novalue"), ConfigError);
}

TEST_CASE("errors name the offending field")
{
  CHECK(field_of(R"({"stations": 0})") == "stations");
  CHECK(field_of("", {parse_override("stations=0")}) == "stations");
  CHECK(field_of(R"({"phy": {"bogus": 1}})") == "phy.bogus");
  CHECK(field_of(R"({"bogus": 1})") == "bogus");
  CHECK(field_of(R"({"traffic": {"trace": "nope.trace"}})") == "traffic.trace");
  CHECK(field_of(R"({"traffic": {"trace": "bad_line.trace"}})") == "traffic.trace");
  CHECK(field_of(R"({"scheduler": "edf"})") == "scheduler");
  CHECK(field_of(R"({"loss_p": 1.5})") == "loss_p");
  CHECK(field_of(R"({"phy": {"basic_rate_bps": 22000000}})") == "phy.basic_rate_bps");
  CHECK(field_of(R"({"tspec": "jurassic-ultra"})") == "tspec");
  CHECK(field_of(R"({"tspec": {"nominal_msdu_bytes": 20000}})").find("nominal_msdu") != std::string::npos);
  CHECK(field_of(R"({"sweep": {"stations": "5..2"}})") == "sweep.stations");
  CHECK(field_of(R"({"stations": [{"traffic": {"synthetic": {"jitter": 2}}}]})").find("jitter") != std::string::npos);
  CHECK(field_of("{not json") == "<config>");
}

TEST_CASE("load_scenario resolves traces relative to the config file")
{
  const std::string path = "scenario_rel_test.json";
  {
    std::ofstream out(path);
    out << R"({"traffic": {"trace": ")" << HCCA_DATA_DIR << R"(/single_frame.trace"}})";
  }
  const auto c = load_scenario(path);
  CHECK(c.stations[0].traffic.trace->records.size() == 1);
  CHECK_THROWS_AS(load_scenario(std::string("missing_config.json")), ConfigError);
}

TEST_CASE("parse_station_range")
{
  CHECK(parse_station_range("1..12") == std::pair<std::size_t, std::size_t>{1, 12});
  CHECK(parse_station_range("4") == std::pair<std::size_t, std::size_t>{4, 4});
  CHECK_THROWS_AS(parse_station_range("0..3"), Error);
  CHECK_THROWS_AS(parse_station_range("3..1"), Error);
  CHECK_THROWS_AS(parse_station_range("a..b"), Error);
}

TEST_CASE("template_key ignores station count, scheduler and seed")
{
  ScenarioConfig a;
  auto b = a.with_stations(7);
  b.scheduler = SchedulerKind::reference;
  b.seed = 99;
  CHECK(template_key(a) == template_key(b));
  b.loss_p = 0.1;
  CHECK(template_key(a) != template_key(b));
}

TEST_CASE("sweep cells and runs")
{
  ScenarioConfig base;
  base.seed = 10;
  base.traffic_start = 1s;
  base.duration = 3s;
  const auto cells = sweep_cells(base, {1, 4}, {SchedulerKind::reference, SchedulerKind::adaptive});
  REQUIRE(cells.size() == 8);
  CHECK(cells[0].scheduler == SchedulerKind::reference);
  CHECK(cells[3].stations == 4);
  CHECK(cells[3].seed == 14);
  CHECK(cells[7].seed == 14);

  const auto serial = run_sweep(base, {1, 4}, {SchedulerKind::reference, SchedulerKind::adaptive}, 1);
  const auto parallel = run_sweep(base, {1, 4}, {SchedulerKind::reference, SchedulerKind::adaptive}, 4);
  REQUIRE(serial.size() == 8);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].event_digest == parallel[i].event_digest);
    CHECK(serial[i].stations == cells[i].stations);
  }

  // A cell equals a standalone run of the same scenario.
  auto one = base.with_stations(3);
  one.scheduler = SchedulerKind::adaptive;
  one.seed = 13;
  CHECK(sim::run(one).event_digest == serial[6].event_digest);
}
