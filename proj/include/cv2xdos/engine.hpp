#pragma once

#include "cv2xdos/sim_time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace cv2xdos {

enum class EventKind : std::uint8_t {
  PacketArrival,
  QueueDispatch,
  VehicleTick,
  GeneratorTick,
  SimEnd,
};

using EventId = std::uint64_t;

class CausalityError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Single-threaded discrete-event engine.
///
/// Events fire in lexicographic (fire_at, seq) order where seq is the insertion
/// counter, so same-time events run in the order they were scheduled.
class Engine {
public:
  using Handler = std::function<void()>;

  struct Event {
    SimTime fire_at;
    EventId seq = 0;
    EventKind kind = EventKind::SimEnd;
    Handler action;
  };

  /// Optional hook called just before each event's action runs.
  using Observer = std::function<void(const Event&)>;

  SimTime now() const noexcept { return now_; }
  std::size_t pending() const noexcept { return queue_.size(); }
  std::uint64_t processed() const noexcept { return processed_; }

  EventId schedule(SimTime fire_at, EventKind kind, Handler action) {
    if (fire_at < now_) {
      throw CausalityError("schedule: fire_at " + std::to_string(fire_at.us()) + " us is before now " +
                           std::to_string(now_.us()) + " us");
    }
    const EventId id = next_seq_++;
    queue_.push(Event{fire_at, id, kind, std::move(action)});
    return id;
  }

  EventId schedule_in(SimTime delay, EventKind kind, Handler action) {
    return schedule(now_ + delay, kind, std::move(action));
  }

  /// Processes every event with fire_at <= t_end, including ones scheduled by
  /// handlers during the call, then parks the clock at t_end.
  std::uint64_t run_until(SimTime t_end) {
    if (t_end < now_) {
      throw CausalityError("run_until: t_end is before now");
    }
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
      // priority_queue::top is const; the event is copied out before pop so the
      // handler may schedule freely.
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.fire_at;
      if (observer_) observer_(ev);
      if (ev.action) ev.action();
      ++count;
      ++processed_;
    }
    now_ = t_end;
    return count;
  }

  void set_observer(Observer obs) { observer_ = std::move(obs); }

private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimTime now_{};
  EventId next_seq_ = 0;
  std::uint64_t processed_ = 0;
  Observer observer_;
};

}  // namespace cv2xdos
