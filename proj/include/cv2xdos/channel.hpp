#pragma once

#include "cv2xdos/rng.hpp"
#include "cv2xdos/sim_time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cv2xdos {

struct ChannelParams {
  double airtime_capacity = 3000.0;  // packets per second
  SimTime delay_min = SimTime::from_ms(25);
  SimTime delay_max = SimTime::from_ms(45);
  SimTime window = SimTime::from_ms(100);
  std::uint64_t seed = 1;

  void validate() const {
    if (!(airtime_capacity > 0.0)) throw std::invalid_argument("channel.airtime_capacity must be > 0");
    if (delay_min < SimTime{}) throw std::invalid_argument("channel.delay_min must be >= 0");
    if (delay_max < delay_min) throw std::invalid_argument("channel.delay_max must be >= channel.delay_min");
    if (window <= SimTime{}) throw std::invalid_argument("channel.window must be > 0");
  }

  /// floor(capacity * window): packets the medium carries per window.
  std::uint64_t per_window() const {
    return static_cast<std::uint64_t>(
        std::floor(airtime_capacity * static_cast<double>(window.us()) / 1e6 + 1e-9));
  }
};

struct ChannelWindowStats {
  SimTime window_start;
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  double busy_fraction = 0.0;
};

/// CBR of one window: min(1, offered / (capacity * window)).
inline double channel_busy_ratio(const ChannelWindowStats& stats, const ChannelParams& params) {
  const double cap = params.airtime_capacity * static_cast<double>(params.window.us()) / 1e6;
  return std::min(1.0, static_cast<double>(stats.offered) / cap);
}

/// Fluid sidelink model. Within each window the first floor(capacity*window)
/// packets offered are delivered and the rest dropped. Delivered packets get a
/// uniform delay in [delay_min, delay_max]; arrivals are clamped so they never
/// overtake an earlier packet.
class Channel {
public:
  explicit Channel(ChannelParams params) : params_(params), rng_(params.seed), per_window_(0) {
    params_.validate();
    per_window_ = params_.per_window();
  }

  const ChannelParams& params() const noexcept { return params_; }

  /// Offers one packet sent at `t`. Calls must come in non-decreasing `t`.
  /// Returns the arrival time at the receiver, or nullopt for a channel drop.
  std::optional<SimTime> transmit(SimTime t) {
    if (t < last_sent_) throw std::logic_error("Channel::transmit: send times must be non-decreasing");
    last_sent_ = t;
    roll_to(window_index(t));
    ++current_.offered;
    if (current_.offered > per_window_) {
      ++current_.dropped;
      return std::nullopt;
    }
    ++current_.delivered;
    const SimTime delay = SimTime::from_us(rng_.uniform(params_.delay_min.us(), params_.delay_max.us()));
    const SimTime at = std::max(t + delay, last_delivery_);
    last_delivery_ = at;
    return at;
  }

  /// Closes every window that starts before `run_end` and returns the trace.
  const std::vector<ChannelWindowStats>& finish(SimTime run_end) {
    if (!finished_) {
      const std::int64_t last = run_end.us() > 0 ? (run_end.us() - 1) / params_.window.us() : 0;
      roll_to(last);
      close_current();
      finished_ = true;
    }
    return closed_;
  }

  const std::vector<ChannelWindowStats>& windows() const noexcept { return closed_; }

private:
  std::int64_t window_index(SimTime t) const noexcept { return t.us() / params_.window.us(); }

  void close_current() {
    current_.busy_fraction = channel_busy_ratio(current_, params_);
    closed_.push_back(current_);
  }

  void roll_to(std::int64_t idx) {
    if (idx == current_idx_) return;
    while (current_idx_ < idx) {
      close_current();
      ++current_idx_;
      current_ = ChannelWindowStats{params_.window * current_idx_};
    }
  }

  ChannelParams params_;
  SplitMix64 rng_;
  std::uint64_t per_window_;
  std::int64_t current_idx_ = 0;
  ChannelWindowStats current_{};
  std::vector<ChannelWindowStats> closed_;
  SimTime last_sent_{};
  SimTime last_delivery_{};
  bool finished_ = false;
};

}  // namespace cv2xdos
