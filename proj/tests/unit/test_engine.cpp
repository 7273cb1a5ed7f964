#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "hcca/engine.hpp"
#include "hcca/error.hpp"

using namespace hcca;
using namespace hcca::sim;
using namespace std::chrono_literals;

namespace {

ScenarioConfig small_scenario(std::size_t stations, SchedulerKind s)
{
  ScenarioConfig c;
  c.scheduler = s;
  c.traffic_start = 1s;
  c.duration = 6s;
  return c.with_stations(stations);
}

StationState station_with(std::initializer_list<Bytes> queued, std::initializer_list<Bytes> upcoming)
{
  auto trace = std::make_shared<traffic::VideoTrace>();
  std::int64_t seq = 0;
  for (Bytes b : queued) trace->records.push_back({seq++, traffic::FrameType::P, 0ms, b});
  for (Bytes b : upcoming) trace->records.push_back({seq++, traffic::FrameType::P, 0ms, b});
  StationState st;
  st.tspec = *sched::tspec_preset("jurassic-high");
  st.source = trace;
  st.total_frames = trace->records.size();
  for (std::size_t k = 0; k < queued.size(); ++k) {
    st.queue.push_back({TimePoint{static_cast<std::int64_t>(k)}, trace->records[k].size, trace->records[k].seq});
    ++st.generated;
  }
  st.next_frame = queued.size();
  return st;
}

}  // namespace

TEST_CASE("QS field")
{
  CHECK(encode_qs(6442, false) == 26);
  CHECK(decode_qs(26, false) == 6656);
  CHECK(encode_qs(256, false) == 1);
  CHECK(encode_qs(257, false) == 2);
  CHECK(encode_qs(0, false) == 0);
  CHECK_FALSE(decode_qs(0, false));
  CHECK(encode_qs(254 * 256, false) == 254);
  CHECK(encode_qs(1'000'000, false) == 254);
  CHECK(encode_qs(6442, true) == 6442);
  CHECK(decode_qs(6442, true) == 6442);

  for (Bytes s = 1; s <= 254 * 256; s += 37) {
    const auto d = decode_qs(encode_qs(s, false), false);
    REQUIRE(d);
    CHECK(*d >= s);
    CHECK(*d - s < 256);
  }
}

TEST_CASE("station_transmit")
{
  const phy::PhyParams p;
  const Duration poll = phy::ctrl_tx_time(p.poll_frame, p) + p.sifs;

  SUBCASE("grant too short for the poll")
  {
    auto st = station_with({1000}, {});
    const auto use = station_transmit(st, poll - 1ns, p, false);
    CHECK(use.frames.empty());
    CHECK(use.used == 0ns);
    CHECK(st.queue.size() == 1);
  }

  SUBCASE("FIFO dequeue while exchanges fit")
  {
    auto st = station_with({1000, 2000, 3000}, {4000});
    const Duration grant = poll + phy::exchange_time(1000, p) + phy::exchange_time(2000, p) + 1ns;
    const auto use = station_transmit(st, grant, p, false);
    REQUIRE(use.frames.size() == 2);
    CHECK(use.frames[0].frame.seq == 0);
    CHECK(use.frames[1].frame.seq == 1);
    CHECK(decode_qs(use.frames[0].frame.qs_field, false) == 2048);
    CHECK(decode_qs(use.frames[1].frame.qs_field, false) == 3072);
    CHECK(use.frames[0].rx_end == poll + phy::data_tx_time(1000, p));
    CHECK(use.used == grant - 1ns);
    CHECK(st.queue.size() == 1);
    CHECK(st.in_flight == 2);
  }

  SUBCASE("queue drained: QS reports the application's next frame")
  {
    auto st = station_with({1000}, {5000});
    const auto use = station_transmit(st, 1s, p, true);
    REQUIRE(use.frames.size() == 1);
    CHECK(use.frames[0].frame.qs_field == 5000);
  }

  SUBCASE("no more frames at all: QS is zero")
  {
    auto st = station_with({1000}, {});
    const auto use = station_transmit(st, 1s, p, false);
    REQUIRE(use.frames.size() == 1);
    CHECK(use.frames[0].frame.qs_field == 0);
  }

  SUBCASE("head does not fit: QoS Null carries the head size")
  {
    auto st = station_with({9000}, {});
    const auto use = station_transmit(st, sched::minimal_txop(p), p, true);
    REQUIRE(use.frames.size() == 1);
    CHECK(use.frames[0].frame.is_null());
    CHECK(use.frames[0].frame.qs_field == 9000);
    CHECK(st.queue.size() == 1);
    CHECK(st.in_flight == 0);
    CHECK(st.null_frames == 1);
  }

  SUBCASE("an adaptive grant always carries the reported frame")
  {
    for (Bytes s = 1; s < 40000; s += 97) {
      auto st = station_with({s}, {});
      const auto use = station_transmit(st, sched::adaptive_txop(s, st.tspec, p), p, false);
      REQUIRE(use.frames.size() == 1);
      CHECK_FALSE(use.frames[0].frame.is_null());
    }
  }
}

TEST_CASE("ap_receive")
{
  auto st = station_with({1000, 2000}, {});
  std::vector<PacketRecord> log;
  const phy::PhyParams p;
  auto use = station_transmit(st, 1s, p, true);
  REQUIRE(use.frames.size() == 2);

  ap_receive(st, use.frames[0].frame, false, 5ms, true, log);
  CHECK(st.rx_this_cap);
  CHECK(st.reported_next_size == 2000);
  ap_receive(st, use.frames[1].frame, true, 6ms, true, log);
  CHECK(st.loss_this_cap);
  CHECK(st.reported_next_size == 2000);

  REQUIRE(log.size() == 2);
  CHECK(log[0].recv_ts == 5ms);
  CHECK_FALSE(log[0].lost);
  CHECK(log[1].lost);
  CHECK(log[1].recv_ts == TimePoint{-1});
  CHECK(st.delivered == 1);
  CHECK(st.lost == 1);
  CHECK(st.in_flight == 0);
}

TEST_CASE("select_grant")
{
  const phy::PhyParams p;
  StationState st;
  st.tspec = *sched::tspec_preset("jurassic-high");
  const Duration ref = 13ms;

  CHECK(select_grant(SchedulerKind::reference, st, true, ref, p).txop == ref);
  auto g = select_grant(SchedulerKind::adaptive, st, false, ref, p);
  CHECK(g.branch == GrantBranch::initial);
  CHECK(g.txop == ref);
  CHECK(select_grant(SchedulerKind::adaptive, st, true, ref, p).branch == GrantBranch::fallback);

  st.feedback_valid = true;
  st.reported_next_size = 6442;
  g = select_grant(SchedulerKind::adaptive, st, true, ref, p);
  CHECK(g.branch == GrantBranch::adaptive);
  CHECK(g.txop == sched::adaptive_txop(6442, st.tspec, p));

  st.reported_next_size.reset();
  g = select_grant(SchedulerKind::adaptive, st, true, ref, p);
  CHECK(g.branch == GrantBranch::minimal);
  CHECK(g.txop == sched::minimal_txop(p));
}

TEST_CASE("EventQueue orders by time then insertion")
{
  EventQueue q;
  q.push(5ns, EventKind::Poll, 1);
  q.push(3ns, EventKind::CapStart);
  q.push(5ns, EventKind::Poll, 2);
  q.push(5ns, EventKind::Arrival, 3);
  q.push(1ns, EventKind::Beacon);
  std::vector<FlowId> at5;
  CHECK(q.pop().kind == EventKind::Beacon);
  CHECK(q.pop().kind == EventKind::CapStart);
  while (!q.empty()) at5.push_back(q.pop().flow);
  CHECK(at5 == std::vector<FlowId>{1, 2, 3});
}

TEST_CASE("run: invariants over a grid of scenarios")
{
  for (auto sched : {SchedulerKind::reference, SchedulerKind::adaptive})
    for (std::size_t n : {1, 3, 6})
      for (double loss : {0.0, 0.1})
        for (bool reclaim : {false, true}) {
          CAPTURE(n);
          CAPTURE(loss);
          CAPTURE(reclaim);
          auto c = small_scenario(n, sched);
          c.loss_p = loss;
          c.reclaim_unused_txop = reclaim;
          c.seed = 7 + n;
          const auto r = run(c, {true});

          // Conservation at the end and the log agrees with the counters.
          std::int64_t delivered = 0, lost = 0;
          for (const auto& f : r.flows) {
            CHECK(f.generated == f.delivered + f.lost + f.queued);
            CHECK(f.generated > 0);
            delivered += f.delivered;
            lost += f.lost;
          }
          CHECK(static_cast<std::int64_t>(r.packets.size()) == delivered + lost);
          if (loss == 0.0) CHECK(lost == 0);

          // Events in non-decreasing time within [0, duration].
          for (std::size_t i = 1; i < r.event_log.size(); ++i)
            REQUIRE(r.event_log[i - 1].time <= r.event_log[i].time);
          CHECK(r.event_log.back().kind == EventKind::SimEnd);
          CHECK(r.event_log.back().time == c.duration);

          // Per flow: FIFO delivery, causality and the traffic window.
          std::map<FlowId, TimePoint> last_gen;
          for (const auto& pkt : r.packets) {
            CHECK(pkt.gen_ts >= c.traffic_start);
            if (!pkt.lost) {
              CHECK(pkt.recv_ts > pkt.gen_ts);
              CHECK(pkt.recv_ts < c.duration);
            }
            auto it = last_gen.find(pkt.flow);
            if (it != last_gen.end()) CHECK(pkt.gen_ts > it->second);
            last_gen[pkt.flow] = pkt.gen_ts;
          }

          // A grant never carries more than it allows; reference grants are the
          // scheduled TXOP.
          for (const auto& g : r.grants) {
            CHECK(g.used <= g.txop);
            if (g.branch == GrantBranch::reference || g.branch == GrantBranch::initial ||
                g.branch == GrantBranch::fallback)
              CHECK(g.txop == r.schedule.grants[g.flow].txop);
          }
          if (sched == SchedulerKind::reference) CHECK(r.reference_grants == static_cast<std::int64_t>(r.grants.size()));
          else CHECK(r.initial_grants == static_cast<std::int64_t>(n));
          if (loss == 0.0 && sched == SchedulerKind::adaptive) CHECK(r.fallback_grants == 0);
        }
}

TEST_CASE("run: CAPs start on SI boundaries unless the previous one is still running")
{
  auto c = small_scenario(2, SchedulerKind::reference);
  const auto r = run(c, {true});
  const auto si = r.schedule.si;
  std::int64_t caps = 0;
  for (const auto& e : r.event_log)
    if (e.kind == EventKind::CapStart) {
      CHECK(e.time == si.boundary(e.arg));
      ++caps;
    }
  CHECK(caps == r.caps);
  CHECK(caps == (c.duration.count() * si.divisor + si.beacon.count() - 1) / si.beacon.count());
}

TEST_CASE("run: deterministic for a seed")
{
  auto c = small_scenario(4, SchedulerKind::adaptive);
  c.loss_p = 0.05;
  const auto a = run(c);
  const auto b = run(c);
  CHECK(a.event_digest == b.event_digest);
  CHECK(a.packets == b.packets);
  c.seed = 2;
  CHECK(run(c).event_digest != a.event_digest);
}

TEST_CASE("run: heavy loss drives the fallback branch")
{
  auto c = small_scenario(2, SchedulerKind::adaptive);
  c.loss_p = 0.9;
  const auto r = run(c);
  CHECK(r.fallback_grants > r.adaptive_grants);
  for (const auto& f : r.flows) CHECK(f.lost > f.delivered);
}

TEST_CASE("run: zero-length and empty windows")
{
  auto c = small_scenario(1, SchedulerKind::adaptive);
  c.traffic_start = c.duration;
  const auto r = run(c);
  CHECK(r.packets.empty());
  CHECK(r.flows.at(0).generated == 0);
  CHECK(r.caps > 0);
}

TEST_CASE("run: admission")
{
  auto c = small_scenario(6, SchedulerKind::adaptive);
  c.admission = true;
  CHECK_THROWS_AS(run(c), AdmissionRejected);

  c.reject_policy = RejectPolicy::ignore;
  const auto r = run(c);
  CHECK(r.rejected == std::vector<FlowId>{3, 4, 5});
  CHECK(r.schedule.grants.size() == 6);

  c = c.with_stations(3);
  const auto ok = run(c);
  CHECK(ok.rejected.empty());
  CHECK(ok.overruns == 0);
}

TEST_CASE("run: overload without admission is recorded, not fatal")
{
  auto c = small_scenario(6, SchedulerKind::reference);
  const auto r = run(c);
  // The last CAP is still open when the run stops.
  CHECK(r.overruns >= r.caps - 1);
  CHECK(r.overruns > 0);
}

TEST_CASE("run: rejects invalid scenarios")
{
  auto c = small_scenario(1, SchedulerKind::adaptive);
  c.stations.clear();
  CHECK_THROWS_AS(run(c), ConfigError);
  c = small_scenario(1, SchedulerKind::adaptive);
  c.loss_p = 1.5;
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("packet log CSV round trips")
{
  const auto r = run(small_scenario(2, SchedulerKind::adaptive));
  CHECK(parse_packet_log_csv(packet_log_csv(r.packets)) == r.packets);
  CHECK_THROWS_AS(parse_packet_log_csv("header\n1,2,3\n"), ParseError);
}

TEST_CASE("station_transmit: one GoP's first two frames")
{
  const phy::PhyParams p;
  auto st = station_with({8124, 6442}, {});
  const Duration grant = phy::ctrl_tx_time(p.poll_frame, p) + p.sifs + phy::exchange_time(8124, p);
  const auto use = station_transmit(st, grant, p, false);
  REQUIRE(use.frames.size() == 1);
  CHECK(use.frames[0].frame.payload == 8124);
  CHECK(use.frames[0].frame.qs_field == 26);

  auto idle = station_with({}, {});
  const auto null = station_transmit(idle, 1s, p, false);
  REQUIRE(null.frames.size() == 1);
  CHECK(null.frames[0].frame.is_null());
  CHECK(null.frames[0].frame.qs_field == 0);

  CHECK(station_transmit(st, 0ns, p, false).frames.empty());
}

TEST_CASE("run: zero duration")
{
  auto c = small_scenario(2, SchedulerKind::adaptive);
  c.duration = 0s;
  c.traffic_start = 0s;
  const auto r = run(c);
  CHECK(r.packets.empty());
  CHECK(r.caps == 0);
}

TEST_CASE("run: one constant-size station is served within one SI")
{
  for (bool exact : {false, true}) {
    auto c = small_scenario(1, SchedulerKind::adaptive);
    auto& syn = c.stations[0].traffic.synthetic;
    syn.gop = "P";
    syn.sizes = {3800, 3800, 3800};
    syn.jitter = 0;
    c.qs_exact = exact;
    const auto r = run(c);
    CHECK(r.flows[0].delivered == r.flows[0].generated);
    for (const auto& pkt : r.packets) CHECK(pkt.delay() <= r.schedule.si.si());
  }
}

// Before traffic starts a station reports its first frame ahead of its arrival.
TEST_CASE("run: quantised reports never under-provision")
{
  auto c = small_scenario(3, SchedulerKind::adaptive);
  c.qs_exact = false;
  const auto r = run(c);
  for (const auto& g : r.grants)
    if (g.branch == GrantBranch::adaptive && g.time >= c.traffic_start) CHECK(g.msdus >= 1);
  CHECK(r.adaptive_grants > 0);
}
