#include "hcca/engine.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "hcca/random.hpp"

namespace hcca::sim {

// ---------------------------------------------------------------------------
// QS field

std::uint32_t encode_qs(Bytes next_size, bool exact)
{
  if (next_size <= 0) return 0;
  if (exact) return static_cast<std::uint32_t>(std::min<Bytes>(next_size, UINT32_MAX));
  const Bytes units = (next_size + kQsUnit - 1) / kQsUnit;
  return static_cast<std::uint32_t>(std::min<Bytes>(units, kQsMaxUnits));
}

std::optional<Bytes> decode_qs(std::uint32_t field, bool exact)
{
  if (field == 0) return std::nullopt;
  return exact ? Bytes{field} : Bytes{field} * kQsUnit;
}

// ---------------------------------------------------------------------------
// Station / AP behaviour

const traffic::FrameRecord& StationState::frame(std::size_t k) const
{
  return source->records[(offset + k) % source->records.size()];
}

std::optional<Bytes> StationState::upcoming_size() const
{
  if (!source || next_frame >= total_frames) return std::nullopt;
  return frame(next_frame).size;
}

TxopUse station_transmit(StationState& st, Duration grant, const phy::PhyParams& p, bool qs_exact)
{
  TxopUse use;
  const Duration poll = phy::ctrl_tx_time(p.poll_frame, p) + p.sifs;
  if (grant < poll) return use;

  // Size of the frame at the queue head once `sent` MSDUs have left.
  auto next_report = [&](std::size_t sent) -> Bytes {
    if (sent < st.queue.size()) return st.queue[sent].size;
    return st.upcoming_size().value_or(0);
  };

  Duration t = poll;
  std::size_t sent = 0;
  while (sent < st.queue.size()) {
    const QueuedMsdu& m = st.queue[sent];
    const Duration ex = phy::exchange_time(m.size, p);
    if (t + ex > grant) break;
    TxFrame f;
    f.frame = QosDataFrame{st.flow, m.seq, m.size, encode_qs(next_report(sent + 1), qs_exact), m.arrival};
    f.rx_end = t + phy::data_tx_time(m.size, p);
    f.ack_end = t + ex;
    use.frames.push_back(f);
    t += ex;
    ++sent;
  }

  if (sent == 0) {
    const Duration ex = phy::exchange_time(0, p);
    if (t + ex <= grant) {
      TxFrame f;
      f.frame = QosDataFrame{st.flow, -1, 0, encode_qs(next_report(0), qs_exact), TimePoint{0}};
      f.rx_end = t + phy::data_tx_time(0, p);
      f.ack_end = t + ex;
      use.frames.push_back(f);
      t += ex;
      ++st.null_frames;
    }
  }

  st.queue.erase(st.queue.begin(), st.queue.begin() + static_cast<std::ptrdiff_t>(sent));
  st.in_flight += static_cast<std::int64_t>(sent);
  use.used = t;
  return use;
}

void ap_receive(StationState& st, const QosDataFrame& frame, bool lost, TimePoint now, bool qs_exact,
                std::vector<PacketRecord>& log)
{
  if (!frame.is_null()) {
    --st.in_flight;
    log.push_back(PacketRecord{frame.flow, frame.seq, frame.generated_at, lost ? TimePoint{-1} : now,
                               frame.payload, lost});
    if (lost) {
      ++st.lost;
    } else {
      ++st.delivered;
      st.delivered_bytes += frame.payload;
    }
  }
  if (lost) {
    st.loss_this_cap = true;
    return;
  }
  st.rx_this_cap = true;
  st.reported_next_size = decode_qs(frame.qs_field, qs_exact);
}

const char* to_string(GrantBranch b)
{
  switch (b) {
    case GrantBranch::reference: return "reference";
    case GrantBranch::initial: return "initial";
    case GrantBranch::fallback: return "fallback";
    case GrantBranch::adaptive: return "adaptive";
    case GrantBranch::minimal: return "minimal";
  }
  return "?";
}

GrantDecision select_grant(SchedulerKind scheduler, const StationState& st, bool ever_polled,
                           Duration reference_txop, const phy::PhyParams& p)
{
  if (scheduler == SchedulerKind::reference) return {GrantBranch::reference, reference_txop};
  if (st.feedback_valid) {
    if (st.reported_next_size) return {GrantBranch::adaptive, sched::adaptive_txop(*st.reported_next_size, st.tspec, p)};
    return {GrantBranch::minimal, sched::minimal_txop(p)};
  }
  return {ever_polled ? GrantBranch::fallback : GrantBranch::initial, reference_txop};
}

// ---------------------------------------------------------------------------
// Events

const char* to_string(EventKind k)
{
  switch (k) {
    case EventKind::Beacon: return "Beacon";
    case EventKind::CapStart: return "CapStart";
    case EventKind::Poll: return "Poll";
    case EventKind::DataRx: return "DataRx";
    case EventKind::AckTx: return "AckTx";
    case EventKind::Arrival: return "Arrival";
    case EventKind::CapEnd: return "CapEnd";
    case EventKind::SimEnd: return "SimEnd";
  }
  return "?";
}

void EventQueue::push(TimePoint time, EventKind kind, FlowId flow, std::int64_t arg)
{
  heap_.push(SimEvent{time, next_seq_++, kind, flow, arg});
}

SimEvent EventQueue::pop()
{
  SimEvent e = heap_.top();
  heap_.pop();
  return e;
}

Duration SimReport::throughput_window() const
{
  return paper_literal_throughput ? duration : duration - traffic_start;
}

// ---------------------------------------------------------------------------
// Simulator

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::int64_t v)
{
  for (int i = 0; i < 8; ++i) {
    h ^= static_cast<std::uint64_t>(v >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
}

struct CapToken {
  std::int64_t si_index = 0;
  bool beacon = false;
};

struct InFlight {
  QosDataFrame frame;
  bool lost = false;
};

class Simulator {
 public:
  Simulator(const ScenarioConfig& cfg, RunOptions opts)
      : cfg_(cfg), opts_(opts), rng_(splitmix64(cfg.seed ^ 0x5bd1e995ULL))
  {
  }

  SimReport run();

 private:
  void setup_stations();
  void setup_schedule();
  void dispatch(const SimEvent& e);
  void on_cap_start(const SimEvent& e);
  void cap_cycle(TimePoint now);
  void on_poll(const SimEvent& e);
  void on_cap_end(const SimEvent& e);
  void on_data_rx(const SimEvent& e);
  void on_arrival(const SimEvent& e);
  void check_conservation() const;
  void finish();

  const ScenarioConfig& cfg_;
  RunOptions opts_;
  std::mt19937_64 rng_;
  SimReport report_;
  EventQueue events_;

  std::vector<StationState> stations_;
  std::vector<Duration> reference_txop_;
  std::vector<bool> ever_polled_;
  std::vector<std::size_t> polling_order_;
  sched::ServiceInterval si_;

  std::deque<CapToken> pending_caps_;
  bool cap_active_ = false;
  std::size_t cap_cursor_ = 0;
  Duration cap_granted_{0};

  std::vector<InFlight> in_flight_;
};

SimReport Simulator::run()
{
  cfg_.validate();
  report_.scheduler = cfg_.scheduler;
  report_.stations = cfg_.stations.size();
  report_.quality = cfg_.quality();
  report_.template_key = template_key(cfg_);
  report_.duration = cfg_.duration;
  report_.traffic_start = cfg_.traffic_start;
  report_.paper_literal_throughput = cfg_.paper_literal_throughput;
  report_.event_digest = kFnvOffset;

  setup_stations();
  setup_schedule();

  if (cfg_.duration.count() > 0) {
    events_.push(cfg_.duration, EventKind::SimEnd);
    // Arrivals go in first so that, at equal timestamps, a frame is queued
    // before the CAP that starts at the same instant.
    for (const auto& st : stations_)
      for (std::size_t k = 0; k < st.total_frames; ++k)
        events_.push(cfg_.traffic_start + static_cast<std::int64_t>(k) * cfg_.frame_interval, EventKind::Arrival,
                     st.flow, static_cast<std::int64_t>(k));
    events_.push(TimePoint{0}, EventKind::Beacon, 0, 0);
    events_.push(TimePoint{0}, EventKind::CapStart, 0, 0);
  }

  while (!events_.empty()) {
    const SimEvent e = events_.pop();
    ++report_.events;
    fnv_mix(report_.event_digest, e.time.count());
    fnv_mix(report_.event_digest, static_cast<std::int64_t>(e.kind));
    fnv_mix(report_.event_digest, e.flow);
    fnv_mix(report_.event_digest, e.arg);
    if (opts_.record_events) report_.event_log.push_back(e);
    if (e.kind == EventKind::SimEnd) break;
    dispatch(e);
    check_conservation();
  }
  finish();
  return std::move(report_);
}

void Simulator::setup_stations()
{
  const Duration active = cfg_.duration - cfg_.traffic_start;
  const std::size_t window_frames =
      active.count() > 0 ? static_cast<std::size_t>((active.count() + cfg_.frame_interval.count() - 1) /
                                                    cfg_.frame_interval.count())
                         : 0;

  stations_.reserve(cfg_.stations.size());
  for (std::size_t i = 0; i < cfg_.stations.size(); ++i) {
    const StationSpec& spec = cfg_.stations[i];
    const std::uint64_t station_seed = splitmix64(splitmix64(cfg_.seed) + i);

    StationState st;
    st.flow = static_cast<FlowId>(i);
    st.tspec = spec.tspec;
    if (spec.traffic.is_file()) {
      auto trace = std::make_shared<traffic::VideoTrace>(*spec.traffic.trace);
      trace->frame_interval = cfg_.frame_interval;
      st.source = std::move(trace);
    } else {
      const auto& syn = spec.traffic.synthetic;
      const std::size_t n = syn.frames ? syn.frames : std::max<std::size_t>(1, window_frames);
      st.source = std::make_shared<traffic::VideoTrace>(
          traffic::synth_trace(syn.gop, syn.sizes, syn.jitter, n, station_seed, cfg_.frame_interval));
    }
    const std::size_t n = st.source->records.size();
    if (cfg_.stagger) {
      std::mt19937_64 r(splitmix64(station_seed));
      st.offset = static_cast<std::size_t>(uniform_index(r, n));
    }
    st.total_frames = std::min(n, window_frames);
    stations_.push_back(std::move(st));
  }
  ever_polled_.assign(stations_.size(), false);
}

void Simulator::setup_schedule()
{
  std::vector<sched::Tspec> tspecs;
  for (const auto& st : stations_) tspecs.push_back(st.tspec);

  sched::Schedule schedule;
  bool admitted_all = true;
  if (cfg_.admission) {
    sched::AdmissionState state(cfg_.beacon_interval, cfg_.cp_reservation, cfg_.phy, cfg_.overhead_mode);
    for (const auto& st : stations_) {
      auto d = sched::admit(state, st.flow, st.tspec);
      if (!d.accepted) {
        if (cfg_.reject_policy == RejectPolicy::abort) throw AdmissionRejected(st.flow, d.reason);
        report_.rejected.push_back(st.flow);
        admitted_all = false;
        continue;
      }
      state = std::move(d.state);
      schedule = std::move(d.schedule);
    }
  }
  if (!cfg_.admission || !admitted_all)
    schedule = sched::schedule_all(tspecs, cfg_.beacon_interval, cfg_.phy, cfg_.overhead_mode);

  si_ = schedule.si;
  reference_txop_.assign(stations_.size(), Duration{0});
  for (const auto& g : schedule.grants) {
    reference_txop_[g.flow] = g.txop;
    polling_order_.push_back(g.flow);
  }
  report_.schedule = std::move(schedule);
}

void Simulator::dispatch(const SimEvent& e)
{
  switch (e.kind) {
    case EventKind::Beacon: break;  // air time is charged by the CAP it opens
    case EventKind::CapStart: on_cap_start(e); break;
    case EventKind::Poll: on_poll(e); break;
    case EventKind::DataRx: on_data_rx(e); break;
    case EventKind::AckTx: break;
    case EventKind::Arrival: on_arrival(e); break;
    case EventKind::CapEnd: on_cap_end(e); break;
    case EventKind::SimEnd: break;
  }
}

void Simulator::on_arrival(const SimEvent& e)
{
  StationState& st = stations_[e.flow];
  const auto k = static_cast<std::size_t>(e.arg);
  const auto& f = st.frame(k);
  st.queue.push_back(QueuedMsdu{e.time, f.size, f.seq});
  st.next_frame = k + 1;
  ++st.generated;
}

void Simulator::on_cap_start(const SimEvent& e)
{
  const std::int64_t k = e.arg;
  pending_caps_.push_back(CapToken{k, si_.is_beacon(k)});

  const TimePoint next = si_.boundary(k + 1);
  if (next < cfg_.duration) {
    if (si_.is_beacon(k + 1)) events_.push(next, EventKind::Beacon, 0, k + 1);
    events_.push(next, EventKind::CapStart, 0, k + 1);
  }
  if (!cap_active_) cap_cycle(e.time);
}

// Opens the next pending CAP: charges the beacon if one is due, turns last
// CAP's receptions into per-station feedback and polls the first station.
// CAPs that fall due while another is running start back to back.
void Simulator::cap_cycle(TimePoint now)
{
  const CapToken token = pending_caps_.front();
  pending_caps_.pop_front();
  cap_active_ = true;
  cap_cursor_ = 0;
  cap_granted_ = Duration{0};
  ++report_.caps;

  TimePoint t = now;
  if (token.beacon && cfg_.phy.beacon_frame > 0) t += phy::ctrl_tx_time(cfg_.phy.beacon_frame, cfg_.phy);

  for (auto& st : stations_) {
    st.feedback_valid = st.rx_this_cap && !st.loss_this_cap;
    st.rx_this_cap = false;
    st.loss_this_cap = false;
  }

  if (polling_order_.empty())
    events_.push(t, EventKind::CapEnd);
  else
    events_.push(t, EventKind::Poll, static_cast<FlowId>(polling_order_.front()));
}

void Simulator::on_poll(const SimEvent& e)
{
  StationState& st = stations_[e.flow];
  const GrantDecision g = select_grant(cfg_.scheduler, st, ever_polled_[e.flow], reference_txop_[e.flow], cfg_.phy);
  ever_polled_[e.flow] = true;
  switch (g.branch) {
    case GrantBranch::reference: ++report_.reference_grants; break;
    case GrantBranch::initial: ++report_.initial_grants; break;
    case GrantBranch::fallback: ++report_.fallback_grants; break;
    case GrantBranch::adaptive: ++report_.adaptive_grants; break;
    case GrantBranch::minimal: ++report_.minimal_grants; break;
  }
  cap_granted_ += g.txop;

  const TxopUse use = station_transmit(st, g.txop, cfg_.phy, cfg_.qs_exact);
  std::int32_t msdus = 0;
  for (const auto& f : use.frames) {
    const auto slot = static_cast<std::int64_t>(in_flight_.size());
    in_flight_.push_back(InFlight{f.frame, false});
    events_.push(e.time + f.rx_end, EventKind::DataRx, st.flow, slot);
    events_.push(e.time + f.ack_end, EventKind::AckTx, st.flow, slot);
    if (!f.frame.is_null()) ++msdus;
  }
  report_.grants.push_back(GrantRecord{report_.caps - 1, e.time, st.flow, g.branch, g.txop, use.used, msdus});

  const Duration hold = cfg_.reclaim_unused_txop && use.used.count() > 0 ? use.used : g.txop;
  const TimePoint next = e.time + hold;
  if (++cap_cursor_ < polling_order_.size())
    events_.push(next, EventKind::Poll, static_cast<FlowId>(polling_order_[cap_cursor_]));
  else
    events_.push(next, EventKind::CapEnd);
}

void Simulator::on_cap_end(const SimEvent& e)
{
  if (cap_granted_ > si_.si()) ++report_.overruns;
  cap_active_ = false;
  if (!pending_caps_.empty()) cap_cycle(e.time);
}

void Simulator::on_data_rx(const SimEvent& e)
{
  InFlight& f = in_flight_[static_cast<std::size_t>(e.arg)];
  f.lost = cfg_.loss_p > 0.0 && uniform01(rng_) < cfg_.loss_p;
  ap_receive(stations_[e.flow], f.frame, f.lost, e.time, cfg_.qs_exact, report_.packets);
}

void Simulator::check_conservation() const
{
  for (const auto& st : stations_) {
    const auto held = static_cast<std::int64_t>(st.queue.size()) + st.in_flight;
    if (st.generated != st.delivered + st.lost + held)
      throw std::logic_error(fmt::format("conservation violated for flow {}: generated {} != {} + {} + {}", st.flow,
                                         st.generated, st.delivered, st.lost, held));
  }
}

void Simulator::finish()
{
  for (const auto& st : stations_) {
    report_.flows.push_back(FlowCounters{st.flow, st.generated, st.delivered, st.lost,
                                         static_cast<std::int64_t>(st.queue.size()) + st.in_flight,
                                         st.delivered_bytes, st.null_frames});
  }
}

}  // namespace

SimReport run(const ScenarioConfig& scenario, RunOptions options)
{
  return Simulator(scenario, options).run();
}

// ---------------------------------------------------------------------------
// Packet log CSV

std::string packet_log_csv(const std::vector<PacketRecord>& log)
{
  std::string out = "flow,seq,gen_ts_ns,recv_ts_ns,size_bytes,lost\n";
  out.reserve(out.size() + log.size() * 40);
  for (const auto& r : log)
    out += fmt::format("{},{},{},{},{},{}\n", r.flow, r.seq, r.gen_ts.count(), r.recv_ts.count(), r.size,
                       r.lost ? 1 : 0);
  return out;
}

std::vector<PacketRecord> parse_packet_log_csv(const std::string& text)
{
  std::istringstream in(text);
  std::string line;
  std::vector<PacketRecord> out;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    PacketRecord r;
    long long gen = 0, recv = 0;
    int lost = 0;
    char c1, c2, c3, c4, c5;
    if (!(ls >> r.flow >> c1 >> r.seq >> c2 >> gen >> c3 >> recv >> c4 >> r.size >> c5 >> lost) || c1 != ',' ||
        c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',')
      throw ParseError("packet log", lineno, "malformed row");
    r.gen_ts = TimePoint{gen};
    r.recv_ts = TimePoint{recv};
    r.lost = lost != 0;
    out.push_back(r);
  }
  return out;
}

}  // namespace hcca::sim
