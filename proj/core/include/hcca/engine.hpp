#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hcca/error.hpp"
#include "hcca/packet.hpp"
#include "hcca/phy.hpp"
#include "hcca/scenario.hpp"
#include "hcca/sched.hpp"
#include "hcca/traffic.hpp"
#include "hcca/units.hpp"

namespace hcca::sim {

using sched::FlowId;

// ---------------------------------------------------------------------------
// Queue Size field
//
// The 8-bit QS subfield counts 256-octet units, capped at 254. In exact mode
// the field carries the byte count unquantised.

inline constexpr std::uint32_t kQsUnit = 256;
inline constexpr std::uint32_t kQsMaxUnits = 254;

std::uint32_t encode_qs(Bytes next_size, bool exact);
// Absent for a zero field.
std::optional<Bytes> decode_qs(std::uint32_t field, bool exact);

struct QosDataFrame {
  FlowId flow = 0;
  std::int64_t seq = -1;  // -1 for a QoS Null
  Bytes payload = 0;
  std::uint32_t qs_field = 0;
  TimePoint generated_at{0};

  bool is_null() const { return seq < 0; }
};

struct QueuedMsdu {
  TimePoint arrival{0};
  Bytes size = 0;
  std::int64_t seq = 0;
};

// Per-station state. The station side owns the MAC queue and the cursor into
// its video source; the AP side mirrors the last reported next-frame size.
struct StationState {
  FlowId flow = 0;
  sched::Tspec tspec;
  std::deque<QueuedMsdu> queue;

  // Source: frames in coding order starting at `offset`, wrapping.
  std::shared_ptr<const traffic::VideoTrace> source;
  std::size_t offset = 0;
  std::size_t next_frame = 0;  // index of the next frame still to arrive
  std::size_t total_frames = 0;  // frames the source will emit in this run

  // AP-side mirror.
  std::optional<Bytes> reported_next_size;
  bool feedback_valid = false;
  bool rx_this_cap = false;
  bool loss_this_cap = false;

  // Counters.
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t lost = 0;
  std::int64_t in_flight = 0;
  Bytes delivered_bytes = 0;
  std::int64_t null_frames = 0;

  // Size of the source frame that has not yet arrived next, if any.
  std::optional<Bytes> upcoming_size() const;
  const traffic::FrameRecord& frame(std::size_t k) const;
};

struct TxFrame {
  QosDataFrame frame;
  Duration rx_end{0};    // from the poll start to the end of the DATA frame
  Duration ack_end{0};   // from the poll start to the end of the ACK + SIFS
};

struct TxopUse {
  std::vector<TxFrame> frames;
  Duration used{0};  // poll + SIFS + all exchanges; zero when the grant cannot carry the poll
};

// Station response to a poll carrying `grant`. The poll and its SIFS come out
// of the grant first; MSDUs are then dequeued FIFO while DATA+SIFS+ACK+SIFS
// fits in what is left. Each frame's QS field describes the frame at the
// queue head after it, or the application's next frame when the queue runs
// dry. If no MSDU fits, a QoS Null carrying the same report is sent when it
// fits.
TxopUse station_transmit(StationState& st, Duration grant, const phy::PhyParams& p, bool qs_exact);

// AP reception. A delivered frame updates the reported size and marks
// feedback for the next CAP; a lost one marks the CAP as lossy. MSDUs are
// appended to `log` either way.
void ap_receive(StationState& st, const QosDataFrame& frame, bool lost, TimePoint now,
                bool qs_exact, std::vector<PacketRecord>& log);

enum class GrantBranch {
  reference,          // reference scheduler
  initial,            // adaptive, no report yet (first CAP of the stream)
  fallback,           // adaptive, no frame from the station last CAP
  adaptive,           // adaptive, sized from the reported next frame
  minimal             // adaptive, station reported nothing pending
};

const char* to_string(GrantBranch b);

struct GrantDecision {
  GrantBranch branch = GrantBranch::reference;
  Duration txop{0};
};

// Per-station TXOP choice at the start of a CAP. `ever_polled` separates the
// first CAP from later fallbacks.
GrantDecision select_grant(SchedulerKind scheduler, const StationState& st, bool ever_polled,
                           Duration reference_txop, const phy::PhyParams& p);

struct GrantRecord {
  std::int64_t cap = 0;
  TimePoint time{0};
  FlowId flow = 0;
  GrantBranch branch = GrantBranch::reference;
  Duration txop{0};
  Duration used{0};
  std::int32_t msdus = 0;
};

// ---------------------------------------------------------------------------
// Events

enum class EventKind { Beacon, CapStart, Poll, DataRx, AckTx, Arrival, CapEnd, SimEnd };

const char* to_string(EventKind k);

struct SimEvent {
  TimePoint time{0};
  std::uint64_t seq = 0;
  EventKind kind = EventKind::SimEnd;
  FlowId flow = 0;
  std::int64_t arg = 0;  // kind-specific: SI index, in-flight slot, ...
};

// Min-queue on (time, insertion sequence).
class EventQueue {
 public:
  void push(TimePoint time, EventKind kind, FlowId flow = 0, std::int64_t arg = 0);
  SimEvent pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const
    {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

// ---------------------------------------------------------------------------
// Report

struct FlowCounters {
  FlowId flow = 0;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t lost = 0;
  std::int64_t queued = 0;  // still held by the MAC at the end, in flight included
  Bytes delivered_bytes = 0;
  std::int64_t null_frames = 0;
};

struct SimReport {
  SchedulerKind scheduler = SchedulerKind::adaptive;
  std::size_t stations = 0;
  std::string quality;
  std::string template_key;
  Duration duration{0};
  Duration traffic_start{0};
  bool paper_literal_throughput = false;

  sched::Schedule schedule;
  std::vector<FlowId> rejected;

  std::vector<PacketRecord> packets;
  std::vector<FlowCounters> flows;
  std::vector<GrantRecord> grants;

  std::int64_t caps = 0;
  std::int64_t overruns = 0;
  std::int64_t reference_grants = 0;
  std::int64_t initial_grants = 0;
  std::int64_t fallback_grants = 0;
  std::int64_t adaptive_grants = 0;
  std::int64_t minimal_grants = 0;

  std::uint64_t events = 0;
  // Every dispatched event, in order; filled only when RunOptions asks.
  std::vector<SimEvent> event_log;
  // FNV-1a over (time, kind, flow, arg) of every dispatched event.
  std::uint64_t event_digest = 0;

  // Active measurement window for throughput.
  Duration throughput_window() const;
};

class AdmissionRejected : public Error {
 public:
  AdmissionRejected(FlowId flow, const std::string& why)
      : Error("flow " + std::to_string(flow) + " rejected by admission control: " + why), flow_(flow) {}
  FlowId flow() const noexcept { return flow_; }

 private:
  FlowId flow_;
};

struct RunOptions {
  bool record_events = false;
};

// Runs one scenario over [0, duration). Throws hcca::ConfigError for an
// invalid scenario and AdmissionRejected when admission is on, a flow is
// rejected and the reject policy is abort.
SimReport run(const ScenarioConfig& scenario, RunOptions options = {});

// Packet log CSV: flow,seq,gen_ts_ns,recv_ts_ns,size_bytes,lost
std::string packet_log_csv(const std::vector<PacketRecord>& log);
std::vector<PacketRecord> parse_packet_log_csv(const std::string& text);

}  // namespace hcca::sim
