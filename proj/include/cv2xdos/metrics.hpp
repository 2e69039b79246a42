#pragma once

#include "cv2xdos/fcw.hpp"
#include "cv2xdos/messages.hpp"
#include "cv2xdos/sim_time.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cv2xdos {

class UndefinedMetricError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Packet delivery ratio in percent.
inline double pdr(std::uint64_t n_sent, std::uint64_t n_recv) {
  if (n_sent == 0) throw UndefinedMetricError("pdr: no BSMs sent");
  if (n_recv > n_sent) throw std::invalid_argument("pdr: received more than sent");
  return 100.0 * static_cast<double>(n_recv) / static_cast<double>(n_sent);
}

struct LatencySample {
  SimTime sent;
  SimTime received;
};

/// Arithmetic mean of (received - sent), in milliseconds.
inline double mean_latency(std::span<const LatencySample> samples) {
  if (samples.empty()) throw UndefinedMetricError("mean_latency: no valid BSMs");
  std::int64_t total_us = 0;
  for (const auto& s : samples) {
    if (s.received < s.sent) throw std::invalid_argument("mean_latency: reception before transmission");
    total_us += (s.received - s.sent).us();
  }
  return static_cast<double>(total_us) / static_cast<double>(samples.size()) / 1e3;
}

enum class LogKind : std::uint8_t { Send, ChannelDrop, Deliver, QueueDrop, Dispatch, Alert };

constexpr std::string_view to_string(LogKind k) noexcept {
  switch (k) {
    case LogKind::Send: return "send";
    case LogKind::ChannelDrop: return "channel-drop";
    case LogKind::Deliver: return "deliver";
    case LogKind::QueueDrop: return "queue-drop";
    case LogKind::Dispatch: return "dispatch";
    case LogKind::Alert: return "alert";
  }
  return "?";
}

struct LogRecord {
  SimTime t;
  std::uint64_t packet_id = 0;
  LogKind kind = LogKind::Send;
  Origin origin = Origin::Attacker;
  PacketKind packet_kind = PacketKind::UdpFiller;
};

/// Append-only trace of one run. Dispatch records mark processing completion.
class RunLog {
public:
  void append(const LogRecord& r) { records_.push_back(r); }
  const std::vector<LogRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  void reserve(std::size_t n) { records_.reserve(n); }

private:
  std::vector<LogRecord> records_;
};

struct MetricsReport {
  std::string scenario;
  std::uint64_t n_sent = 0;
  std::uint64_t n_recv = 0;
  double pdr = 0.0;
  std::optional<double> mean_latency_ms;
  std::uint64_t channel_drops = 0;
  std::uint64_t queue_drops = 0;
  std::optional<SimTime> last_valid_bsm;
  std::optional<SimTime> fcw_trigger;
  std::optional<SimTime> ground_truth_cross;
  AlertClass classification = AlertClass::Missed;
  bool spurious_alert = false;
  bool attack_success = false;
  std::vector<double> cbr_trace;  // busy fraction per channel window
  SimTime cbr_window;
};

/// Single-pass reduction of a RunLog into the metrics it determines.
struct LogReduction {
  std::uint64_t n_sent = 0;
  std::uint64_t n_recv = 0;
  std::int64_t latency_sum_us = 0;
  std::uint64_t channel_drops = 0;
  std::uint64_t queue_drops = 0;
  std::optional<SimTime> last_valid_bsm;
  std::optional<SimTime> fcw_trigger;

  std::optional<double> pdr_pct() const { return n_sent ? std::optional(pdr(n_sent, n_recv)) : std::nullopt; }
  std::optional<double> mean_latency_ms() const {
    if (n_recv == 0) return std::nullopt;
    return static_cast<double>(latency_sum_us) / static_cast<double>(n_recv) / 1e3;
  }
};

inline LogReduction reduce(const RunLog& log) {
  LogReduction r;
  std::unordered_map<std::uint64_t, SimTime> sent_at;
  for (const auto& rec : log.records()) {
    const bool legit_bsm = rec.origin == Origin::Legit && rec.packet_kind == PacketKind::Bsm;
    switch (rec.kind) {
      case LogKind::Send:
        if (legit_bsm) {
          ++r.n_sent;
          sent_at.emplace(rec.packet_id, rec.t);
        }
        break;
      case LogKind::ChannelDrop: ++r.channel_drops; break;
      case LogKind::QueueDrop: ++r.queue_drops; break;
      case LogKind::Dispatch:
        if (legit_bsm) {
          ++r.n_recv;
          r.latency_sum_us += (rec.t - sent_at.at(rec.packet_id)).us();
          r.last_valid_bsm = rec.t;
        }
        break;
      case LogKind::Alert:
        if (!r.fcw_trigger) r.fcw_trigger = rec.t;
        break;
      case LogKind::Deliver: break;
    }
  }
  return r;
}

}  // namespace cv2xdos
