#pragma once

#include "cv2xdos/sim_time.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace cv2xdos {

enum class VehicleId : std::uint8_t { A = 1, B = 2, Attacker = 3 };

constexpr std::string_view to_string(VehicleId id) noexcept {
  switch (id) {
    case VehicleId::A: return "A";
    case VehicleId::B: return "B";
    case VehicleId::Attacker: return "attacker";
  }
  return "?";
}

class PassedLeadError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// 1-D constant-velocity vehicle state.
///
/// Position is kept in integer nanometres and speed in integer mm/s, so one
/// microsecond of travel is exactly speed_mm_s nanometres and integration is
/// additive without rounding.
struct VehicleState {
  VehicleId id = VehicleId::A;
  std::int64_t position_nm = 0;
  std::int64_t speed_mm_s = 0;
  bool braking = false;

  static VehicleState make(VehicleId id, double position_m, double speed_mps, bool braking = false) {
    if (!(speed_mps >= 0.0)) throw std::invalid_argument("VehicleState: speed must be >= 0");
    return VehicleState{id, std::llround(position_m * 1e9), std::llround(speed_mps * 1e3), braking};
  }

  double position_m() const noexcept { return static_cast<double>(position_nm) / 1e9; }
  double speed_mps() const noexcept { return static_cast<double>(speed_mm_s) / 1e3; }

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

inline VehicleState advance(VehicleState s, SimTime dt) {
  if (dt < SimTime{}) throw std::invalid_argument("advance: negative dt");
  s.position_nm += s.speed_mm_s * dt.us();
  return s;
}

/// Distance from follower `a` to lead `b` in metres.
inline double gap(const VehicleState& a, const VehicleState& b) {
  if (a.position_nm > b.position_nm) {
    throw PassedLeadError("gap: follower is ahead of lead vehicle");
  }
  return static_cast<double>(b.position_nm - a.position_nm) / 1e9;
}

/// Ground-truth track of a constant-velocity vehicle.
struct VehicleTrack {
  VehicleState initial;
  SimTime covered_until = SimTime::max();

  bool covers(SimTime t) const noexcept { return t <= covered_until; }
  VehicleState at(SimTime t) const { return advance(initial, t); }
};

/// Earliest instant after which d(t)/(vA - vB) stays below `threshold`, i.e. the
/// time TTC reaches the threshold (clamped at 0). nullopt when the gap never closes.
inline std::optional<SimTime> ground_truth_ttc_crossing(std::int64_t gap_nm, std::int64_t va_mm_s,
                                                        std::int64_t vb_mm_s, SimTime threshold) {
  if (threshold <= SimTime{}) throw std::invalid_argument("ttc crossing: threshold must be > 0");
  const std::int64_t closing = va_mm_s - vb_mm_s;
  if (closing <= 0) return std::nullopt;
  // gap_nm / closing_mm_s is the time-to-contact in microseconds; round up so
  // the returned instant is never before the real crossing.
  const std::int64_t contact_us = (gap_nm + closing - 1) / closing;
  const std::int64_t t = contact_us - threshold.us();
  return SimTime::from_us(t > 0 ? t : 0);
}

inline std::optional<SimTime> ground_truth_ttc_crossing(double d0_m, double va_mps, double vb_mps,
                                                        double threshold_s) {
  if (!(threshold_s > 0.0)) throw std::invalid_argument("ttc crossing: threshold must be > 0");
  return ground_truth_ttc_crossing(std::llround(d0_m * 1e9), std::llround(va_mps * 1e3),
                                   std::llround(vb_mps * 1e3), SimTime::from_seconds(threshold_s));
}

}  // namespace cv2xdos
