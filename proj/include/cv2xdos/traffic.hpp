#pragma once

#include "cv2xdos/kinematics.hpp"
#include "cv2xdos/messages.hpp"
#include "cv2xdos/sim_time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace cv2xdos {

enum class TrafficKind : std::uint8_t { LegitBsm, UdpFlood, BsmFlood };

constexpr std::string_view to_string(TrafficKind k) noexcept {
  switch (k) {
    case TrafficKind::LegitBsm: return "legit-bsm";
    case TrafficKind::UdpFlood: return "udp-flood";
    case TrafficKind::BsmFlood: return "bsm-flood";
  }
  return "?";
}

class TrackCoverageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A periodic packet stream. A rate of zero is an idle stream (no packets).
struct TrafficSpec {
  TrafficKind kind = TrafficKind::LegitBsm;
  double rate = 10.0;  // packets per second
  SimTime start;
  SimTime duration;
  std::size_t payload_size = 200;
  Origin origin = Origin::Legit;

  bool carries_bsm() const noexcept { return kind != TrafficKind::UdpFlood; }
};

struct ScheduledPacket {
  SimTime fire_at;
  std::uint32_t stream = 0;  // index of the generating spec after compose()
  Packet packet;
};

using ArrivalSchedule = std::vector<ScheduledPacket>;

/// floor(rate * duration), computed so that exact products (10 Hz * 2 s) never
/// lose a packet to floating-point error.
inline std::uint64_t periodic_count(double rate, SimTime duration) {
  if (!(rate >= 0.0)) throw std::invalid_argument("traffic: rate must be >= 0");
  if (duration < SimTime{}) throw std::invalid_argument("traffic: duration must be >= 0");
  const long double n = static_cast<long double>(rate) * static_cast<long double>(duration.us()) / 1e6L;
  return static_cast<std::uint64_t>(std::floor(n + 1e-9L));
}

/// Offset of the i-th emission from the stream start.
inline SimTime periodic_offset(double rate, std::uint64_t i) {
  const long double off = static_cast<long double>(i) * 1e6L / static_cast<long double>(rate);
  return SimTime::from_us(static_cast<SimTime::rep>(std::floor(off + 1e-6L)));
}

/// Emits floor(rate * duration) packets at start, start + 1/rate, ... with the
/// end of the window exclusive. BSM kinds sample `track` at each emission.
inline ArrivalSchedule generate(const TrafficSpec& spec, const VehicleTrack* track) {
  const std::uint64_t n = periodic_count(spec.rate, spec.duration);
  ArrivalSchedule out;
  if (n == 0) return out;
  if (spec.carries_bsm()) {
    if (track == nullptr) {
      throw TrackCoverageError("generate: " + std::string(to_string(spec.kind)) + " needs a vehicle track");
    }
    if (!track->covers(spec.start + spec.duration)) {
      throw TrackCoverageError("generate: vehicle track ends before the stream does");
    }
  }
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const SimTime t = spec.start + periodic_offset(spec.rate, i);
    ScheduledPacket sp;
    sp.fire_at = t;
    if (spec.carries_bsm()) {
      const Bsm bsm = build_bsm(track->at(t), i, t, spec.payload_size);
      sp.packet.kind = PacketKind::Bsm;
      sp.packet.body = encode(bsm);
    } else {
      sp.packet = build_udp_filler(spec.payload_size, i);
    }
    sp.packet.id = i;
    sp.packet.sent_at = t;
    sp.packet.origin = spec.origin;
    out.push_back(std::move(sp));
  }
  return out;
}

/// Merges sorted schedules into one. Same-instant packets go legit first, then
/// by input index, then by their order within the input. Packet ids and
/// stream indices are rewritten to the merged position and input index.
inline ArrivalSchedule compose(std::vector<ArrivalSchedule> schedules) {
  std::size_t total = 0;
  for (const auto& s : schedules) total += s.size();
  ArrivalSchedule out;
  out.reserve(total);
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    for (auto& sp : schedules[k]) {
      sp.stream = static_cast<std::uint32_t>(k);
      out.push_back(std::move(sp));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ScheduledPacket& a, const ScheduledPacket& b) {
    if (a.fire_at != b.fire_at) return a.fire_at < b.fire_at;
    if (a.packet.origin != b.packet.origin) return a.packet.origin == Origin::Legit;
    return a.stream < b.stream;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].packet.id = i;
  return out;
}

}  // namespace cv2xdos
