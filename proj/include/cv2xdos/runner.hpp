#pragma once

#include "cv2xdos/channel.hpp"
#include "cv2xdos/engine.hpp"
#include "cv2xdos/fcw.hpp"
#include "cv2xdos/kinematics.hpp"
#include "cv2xdos/messages.hpp"
#include "cv2xdos/metrics.hpp"
#include "cv2xdos/receiver.hpp"
#include "cv2xdos/scenario.hpp"
#include "cv2xdos/traffic.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cv2xdos {

struct RunOptions {
  bool keep_log = true;
  bool queue_trace = false;
  /// Re-checks queue conservation after every event; throws on violation.
  bool check_invariants = false;
};

enum class QueueEvent : std::uint8_t { Enqueue, Drop, Dispatch };

constexpr std::string_view to_string(QueueEvent e) noexcept {
  switch (e) {
    case QueueEvent::Enqueue: return "enqueue";
    case QueueEvent::Drop: return "drop";
    case QueueEvent::Dispatch: return "dispatch";
  }
  return "?";
}

struct QueueTraceEntry {
  SimTime t;
  std::uint64_t q = 0;
  QueueEvent event = QueueEvent::Enqueue;
};

struct RunResult {
  MetricsReport report;
  RunLog log;
  std::vector<QueueTraceEntry> queue_trace;
};

class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Builds the vehicle tracks used by a scenario.
struct ScenarioTracks {
  VehicleTrack a;
  VehicleTrack b;
  VehicleTrack attacker;

  explicit ScenarioTracks(const Scenario& s) {
    a.initial = VehicleState::make(VehicleId::A, s.vehicle_a.position, s.vehicle_a.speed, s.vehicle_a.braking);
    b.initial = VehicleState::make(VehicleId::B, s.vehicle_b.position, s.vehicle_b.speed, s.vehicle_b.braking);
    const VehicleSpec att = s.attacker_vehicle.value_or(VehicleSpec{s.vehicle_b.position, 0.0, false});
    attacker.initial = VehicleState::make(VehicleId::Attacker, att.position, att.speed, att.braking);
    a.covered_until = b.covered_until = attacker.covered_until = s.run_end;
  }
};

inline std::optional<SimTime> scenario_ground_truth(const Scenario& s) {
  const ScenarioTracks tracks(s);
  return ground_truth_ttc_crossing(tracks.b.initial.position_nm - tracks.a.initial.position_nm,
                                   tracks.a.initial.speed_mm_s, tracks.b.initial.speed_mm_s,
                                   SimTime::from_seconds(s.fcw.ttc_threshold));
}

namespace detail {

/// Wires traffic -> channel -> receiver queue -> FCW on one engine.
class ScenarioRun {
public:
  ScenarioRun(const Scenario& s, RunOptions opts)
      : s_(s), opts_(opts), tracks_(s), channel_(s.channel), queue_(s.queue), fcw_(s.fcw, VehicleId::A) {}

  RunResult run() {
    std::vector<ArrivalSchedule> parts;
    parts.push_back(generate(s_.legit, &tracks_.a));
    for (const auto& a : s_.attacks) parts.push_back(generate(a, &tracks_.attacker));
    schedule_ = compose(std::move(parts));
    if (opts_.keep_log) result_.log.reserve(schedule_.size() * 4);

    if (!schedule_.empty()) schedule_send(0);
    engine_.schedule(s_.run_end, EventKind::SimEnd, {});
    engine_.run_until(s_.run_end);

    finish_report();
    return std::move(result_);
  }

private:
  void log(SimTime t, const Packet& p, LogKind kind) {
    if (!opts_.keep_log) return;
    result_.log.append(LogRecord{t, p.id, kind, p.origin, p.kind});
  }

  void trace(QueueEvent e) {
    if (opts_.queue_trace) result_.queue_trace.push_back(QueueTraceEntry{engine_.now(), queue_.size(), e});
  }

  void check() {
    if (opts_.check_invariants && !queue_.conserved()) {
      throw InvariantViolation("receiver queue conservation violated at t=" + std::to_string(engine_.now().us()));
    }
  }

  static bool is_legit_bsm(const Packet& p) { return p.origin == Origin::Legit && p.kind == PacketKind::Bsm; }

  void schedule_send(std::size_t idx) {
    engine_.schedule(schedule_[idx].fire_at, EventKind::GeneratorTick, [this, idx] { on_send(idx); });
  }

  void on_send(std::size_t idx) {
    const SimTime now = engine_.now();
    const Packet& p = schedule_[idx].packet;
    log(now, p, LogKind::Send);
    if (is_legit_bsm(p)) ++n_sent_;
    if (const auto arrival = channel_.transmit(now)) {
      engine_.schedule(*arrival, EventKind::PacketArrival, [this, idx] { on_arrival(idx); });
    } else {
      ++channel_drops_;
      log(now, p, LogKind::ChannelDrop);
    }
    if (idx + 1 < schedule_.size()) schedule_send(idx + 1);
  }

  void on_arrival(std::size_t idx) {
    const SimTime now = engine_.now();
    Packet& p = schedule_[idx].packet;
    log(now, p, LogKind::Deliver);
    const std::uint64_t id = p.id;
    const Origin origin = p.origin;
    const PacketKind kind = p.kind;
    if (queue_.enqueue(std::move(p), now) == EnqueueResult::QueueDrop) {
      ++queue_drops_;
      if (opts_.keep_log) result_.log.append(LogRecord{now, id, LogKind::QueueDrop, origin, kind});
      trace(QueueEvent::Drop);
    } else {
      trace(QueueEvent::Enqueue);
      if (!in_service_) start_service();
    }
    check();
  }

  void start_service() {
    auto d = queue_.dispatch_next(engine_.now());
    if (!d) {
      in_service_ = false;
      return;
    }
    in_service_ = true;
    trace(QueueEvent::Dispatch);
    const SimTime done = d->completed_at;
    current_ = std::move(*d);
    engine_.schedule(done, EventKind::QueueDispatch, [this] { on_complete(); });
  }

  void on_complete() {
    const SimTime now = engine_.now();
    const Packet& p = current_->packet;
    log(now, p, LogKind::Dispatch);
    if (p.kind == PacketKind::Bsm) {
      const Bsm bsm = decode(p.body);
      if (is_legit_bsm(p) && bsm.sender == fcw_.tracked()) {
        ++n_recv_;
        latency_sum_us_ += (now - p.sent_at).us();
        if (fcw_.on_bsm(bsm, now, tracks_.b.at(now)) == FcwAction::AlertRaised) log(now, p, LogKind::Alert);
      }
    }
    current_.reset();
    start_service();
    check();
  }

  void finish_report() {
    MetricsReport& r = result_.report;
    r.scenario = s_.name;
    r.n_sent = n_sent_;
    r.n_recv = n_recv_;
    r.pdr = pdr(n_sent_, n_recv_);
    if (n_recv_ > 0) r.mean_latency_ms = static_cast<double>(latency_sum_us_) / static_cast<double>(n_recv_) / 1e3;
    r.channel_drops = channel_drops_;
    r.queue_drops = queue_drops_;
    const AlertRecord& rec = fcw_.record();
    r.last_valid_bsm = rec.last_valid_bsm_time;
    r.fcw_trigger = rec.trigger_time;
    r.ground_truth_cross = scenario_ground_truth(s_);
    const Classification c = classify(rec, r.ground_truth_cross, s_.run_end, s_.fcw);
    r.classification = c.alert;
    r.spurious_alert = c.spurious;
    r.attack_success = r.classification != AlertClass::Timely;
    r.cbr_window = s_.channel.window;
    for (const auto& w : channel_.finish(s_.run_end)) r.cbr_trace.push_back(w.busy_fraction);
  }

  const Scenario& s_;
  RunOptions opts_;
  ScenarioTracks tracks_;
  Engine engine_;
  Channel channel_;
  ReceiverQueue queue_;
  Fcw fcw_;
  ArrivalSchedule schedule_;
  std::optional<Dispatch> current_;
  bool in_service_ = false;
  std::uint64_t n_sent_ = 0;
  std::uint64_t n_recv_ = 0;
  std::int64_t latency_sum_us_ = 0;
  std::uint64_t channel_drops_ = 0;
  std::uint64_t queue_drops_ = 0;
  RunResult result_;
};

}  // namespace detail

/// Runs one scenario end to end and returns its metrics and event log.
inline RunResult run_scenario(const Scenario& s, RunOptions opts = {}) {
  return detail::ScenarioRun(s, opts).run();
}

}  // namespace cv2xdos
