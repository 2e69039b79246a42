#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace cv2xdos {

/// Simulation timestamp in integer microseconds since the start of a run.
///
/// Integer time keeps every run bit-exact across platforms; floating point only
/// appears at the reporting boundary (seconds(), milliseconds()).
class SimTime {
public:
  using rep = std::int64_t;

  constexpr SimTime() noexcept = default;

  static constexpr SimTime from_us(rep us) noexcept { return SimTime{us}; }
  static constexpr SimTime from_ms(rep ms) noexcept { return SimTime{ms * 1'000}; }
  static constexpr SimTime from_s(rep s) noexcept { return SimTime{s * 1'000'000}; }
  /// Rounds to the nearest microsecond.
  static SimTime from_seconds(double s) {
    if (!(s >= 0.0) || s > 9.0e12) {
      throw std::invalid_argument("SimTime: seconds out of range");
    }
    return SimTime{static_cast<rep>(s * 1e6 + 0.5)};
  }
  static constexpr SimTime max() noexcept { return SimTime{std::numeric_limits<rep>::max()}; }

  constexpr rep us() const noexcept { return us_; }
  constexpr double milliseconds() const noexcept { return static_cast<double>(us_) / 1e3; }
  constexpr double seconds() const noexcept { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const noexcept = default;

  constexpr SimTime& operator+=(SimTime o) noexcept {
    us_ += o.us_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) noexcept {
    us_ -= o.us_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) noexcept { return SimTime{a.us_ + b.us_}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) noexcept { return SimTime{a.us_ - b.us_}; }
  friend constexpr SimTime operator*(SimTime a, rep k) noexcept { return SimTime{a.us_ * k}; }
  friend constexpr SimTime operator*(rep k, SimTime a) noexcept { return SimTime{a.us_ * k}; }

private:
  constexpr explicit SimTime(rep us) noexcept : us_(us) {}
  rep us_ = 0;
};

namespace literals {
constexpr SimTime operator""_us(unsigned long long v) { return SimTime::from_us(static_cast<SimTime::rep>(v)); }
constexpr SimTime operator""_ms(unsigned long long v) { return SimTime::from_ms(static_cast<SimTime::rep>(v)); }
constexpr SimTime operator""_s(unsigned long long v) { return SimTime::from_s(static_cast<SimTime::rep>(v)); }
}  // namespace literals

}  // namespace cv2xdos
