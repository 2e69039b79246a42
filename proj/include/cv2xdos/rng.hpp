#pragma once

#include <cstdint>

namespace cv2xdos {

/// SplitMix64 (Steele, Lea, Flood 2014). Fixed algorithm so a seed reproduces
/// the same stream on every platform and standard library.
class SplitMix64 {
public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [lo, hi] via the multiply-shift reduction.
  constexpr std::int64_t uniform(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    const auto r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * span) >> 64);
    return lo + static_cast<std::int64_t>(r);
  }

  /// Uniform double in [0, 1).
  constexpr double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

}  // namespace cv2xdos
