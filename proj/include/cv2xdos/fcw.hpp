#pragma once

#include "cv2xdos/kinematics.hpp"
#include "cv2xdos/messages.hpp"
#include "cv2xdos/sim_time.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace cv2xdos {

struct FcwConfig {
  double ttc_threshold = 3.0;  // seconds
  double critical_zone = 30.0;  // metres
  double grace = 0.5;           // seconds of lag still counted as timely

  void validate() const {
    if (!(ttc_threshold > 0.0)) throw std::invalid_argument("fcw.ttc_threshold must be > 0");
    if (!(critical_zone > 0.0)) throw std::invalid_argument("fcw.critical_zone must be > 0");
    if (!(grace > 0.0)) throw std::invalid_argument("fcw.grace must be > 0");
  }
};

enum class AlertClass : std::uint8_t { Timely, Delayed, Missed };

constexpr std::string_view to_string(AlertClass c) noexcept {
  switch (c) {
    case AlertClass::Timely: return "timely";
    case AlertClass::Delayed: return "delayed";
    case AlertClass::Missed: return "missed";
  }
  return "?";
}

struct AlertRecord {
  bool triggered = false;
  std::optional<SimTime> trigger_time;
  std::optional<SimTime> last_valid_bsm_time;
  AlertClass classification = AlertClass::Missed;
};

/// Time-to-collision d / (vA - vB); +inf when the gap is not closing.
inline double ttc(double d, double va, double vb) {
  if (d < 0.0) throw std::invalid_argument("ttc: negative gap");
  const double closing = va - vb;
  if (closing <= 0.0) return std::numeric_limits<double>::infinity();
  return d / closing;
}

enum class FcwAction : std::uint8_t { NoAction, AlertRaised };

/// FCW running on the lead vehicle. It trusts the follower's reported position
/// and speed, so a stale BSM yields a stale (too optimistic) TTC.
class Fcw {
public:
  explicit Fcw(FcwConfig cfg, VehicleId tracked = VehicleId::A) : cfg_(cfg), tracked_(tracked) { cfg_.validate(); }

  const FcwConfig& config() const noexcept { return cfg_; }
  const AlertRecord& record() const noexcept { return record_; }
  VehicleId tracked() const noexcept { return tracked_; }

  /// TTC as seen from a BSM. Position and speed arrive rounded to the wire
  /// grid, so the follower is assumed at the near edge of its position cell
  /// and the top of its speed cell; rounding can then only make an alert earlier.
  double perceived_ttc(const Bsm& bsm, const VehicleState& own) const {
    const double pos = bsm.position_m() + 0.5 * geo::kMetresPerMicroDegree;
    const double speed = bsm.speed_mps() + 0.005;
    // A reported position at or past our own means contact.
    return ttc(std::max(0.0, own.position_m() - pos), speed, own.speed_mps());
  }

  FcwAction on_bsm(const Bsm& bsm, SimTime receive_time, const VehicleState& own) {
    record_.last_valid_bsm_time = receive_time;
    if (record_.triggered || !(perceived_ttc(bsm, own) < cfg_.ttc_threshold)) return FcwAction::NoAction;
    record_.triggered = true;
    record_.trigger_time = receive_time;
    return FcwAction::AlertRaised;
  }

private:
  FcwConfig cfg_;
  VehicleId tracked_;
  AlertRecord record_;
};

struct Classification {
  AlertClass alert = AlertClass::Missed;
  bool spurious = false;  // alert raised although the ground truth never crossed
};

/// timely: triggered no later than crossing + grace. delayed: triggered later.
/// missed: no trigger although the ground truth crossed within the run. Without
/// a crossing inside the run, silence is correct (timely) and an alert is
/// flagged spurious.
inline Classification classify(const AlertRecord& alert, std::optional<SimTime> ground_truth_cross, SimTime run_end,
                               const FcwConfig& cfg) {
  if (alert.triggered != alert.trigger_time.has_value()) {
    throw std::invalid_argument("classify: inconsistent alert record");
  }
  const bool crossed = ground_truth_cross.has_value() && *ground_truth_cross <= run_end;
  if (!crossed) return Classification{AlertClass::Timely, alert.triggered};
  if (!alert.triggered || *alert.trigger_time > run_end) return Classification{AlertClass::Missed, false};
  const SimTime deadline = *ground_truth_cross + SimTime::from_seconds(cfg.grace);
  return Classification{*alert.trigger_time <= deadline ? AlertClass::Timely : AlertClass::Delayed, false};
}

}  // namespace cv2xdos
