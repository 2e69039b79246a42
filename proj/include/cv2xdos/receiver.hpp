#pragma once

#include "cv2xdos/messages.hpp"
#include "cv2xdos/sim_time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>

namespace cv2xdos {

struct QueueParams {
  std::uint64_t capacity_msgs = 8192;
  SimTime t_base = SimTime::from_us(500);
  SimTime c_byte = SimTime::from_us(3);  // per payload byte
  double lambda_pc5 = 1975.0;            // messages per second

  void validate() const {
    if (capacity_msgs == 0) throw std::invalid_argument("queue.capacity_msgs must be > 0");
    if (t_base <= SimTime{}) throw std::invalid_argument("queue.t_base must be > 0");
    if (c_byte < SimTime{}) throw std::invalid_argument("queue.c_byte must be >= 0");
    if (!(lambda_pc5 > 0.0)) throw std::invalid_argument("queue.lambda_pc5 must be > 0");
  }

  /// 1 / lambda_pc5, rounded to the microsecond.
  SimTime min_service() const { return SimTime::from_us(std::llround(1e6 / lambda_pc5)); }
};

/// Per-message processing cost: t_base + c_byte * size.
inline SimTime processing_time(std::size_t size, const QueueParams& params) {
  return params.t_base + params.c_byte * static_cast<SimTime::rep>(size);
}

/// Time the receiver is occupied by one message: the slower of the CPU cost
/// and the PC5 service bound.
inline SimTime service_time(std::size_t size, const QueueParams& params) {
  return std::max(processing_time(size, params), params.min_service());
}

/// Clamped discrete queue balance max(0, min(capacity, Q + A - D)).
inline std::uint64_t step_balance(std::uint64_t q, std::uint64_t arrivals, std::uint64_t dispatched,
                                  std::uint64_t capacity = std::numeric_limits<std::uint64_t>::max()) {
  const auto inflow = static_cast<long double>(q) + static_cast<long double>(arrivals);
  const long double next = inflow - static_cast<long double>(dispatched);
  if (next <= 0) return 0;
  if (next >= static_cast<long double>(capacity)) return capacity;
  return static_cast<std::uint64_t>(q + arrivals - dispatched);
}

enum class EnqueueResult : std::uint8_t { Accepted, QueueDrop };

struct QueuedPacket {
  Packet packet;
  SimTime enqueued_at;
};

struct Dispatch {
  Packet packet;
  SimTime enqueued_at;
  SimTime started_at;
  SimTime completed_at;
};

/// Bounded FIFO with tail drop and a single server.
///
/// Q counts messages waiting; the message in service has already been popped
/// and counted in dispatched_total, so arrivals_total == dispatched_total +
/// dropped_total + Q holds after every operation.
class ReceiverQueue {
public:
  explicit ReceiverQueue(QueueParams params) : params_(params) { params_.validate(); }

  const QueueParams& params() const noexcept { return params_; }
  std::uint64_t size() const noexcept { return queued_.size(); }
  bool empty() const noexcept { return queued_.empty(); }
  std::uint64_t arrivals_total() const noexcept { return arrivals_; }
  std::uint64_t dispatched_total() const noexcept { return dispatched_; }
  std::uint64_t dropped_total() const noexcept { return dropped_; }
  SimTime busy_until() const noexcept { return busy_until_; }
  bool busy_at(SimTime t) const noexcept { return t < busy_until_; }

  bool conserved() const noexcept { return arrivals_ == dispatched_ + dropped_ + queued_.size(); }

  EnqueueResult enqueue(Packet packet, SimTime t) {
    ++arrivals_;
    if (queued_.size() >= params_.capacity_msgs) {
      ++dropped_;
      return EnqueueResult::QueueDrop;
    }
    queued_.push_back(QueuedPacket{std::move(packet), t});
    return EnqueueResult::Accepted;
  }

  /// Pops the head and puts it in service. nullopt when nothing is waiting.
  std::optional<Dispatch> dispatch_next(SimTime t) {
    if (t < busy_until_) throw std::logic_error("dispatch_next: receiver still busy");
    if (queued_.empty()) return std::nullopt;
    QueuedPacket head = std::move(queued_.front());
    queued_.pop_front();
    ++dispatched_;
    const SimTime done = t + service_time(head.packet.size(), params_);
    busy_until_ = done;
    return Dispatch{std::move(head.packet), head.enqueued_at, t, done};
  }

private:
  QueueParams params_;
  std::deque<QueuedPacket> queued_;
  std::uint64_t arrivals_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t dropped_ = 0;
  SimTime busy_until_{};
};

}  // namespace cv2xdos
