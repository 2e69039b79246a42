#pragma once

#include "cv2xdos/kinematics.hpp"
#include "cv2xdos/sim_time.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cv2xdos {

// Wire layout of an encoded BSM, all multi-byte fields big-endian:
//
//   off  len  field
//     0    4  magic "CVBM"
//     4    1  version
//     5    1  sender
//     6    2  reserved
//     8    8  seq
//    16    8  gen_time (us)
//    24    4  latitude (micro-degrees, signed)
//    28    4  longitude (micro-degrees, signed)
//    32    4  speed (cm/s)
//    36    1  braking
//    37    3  reserved
//    40    -  zero padding up to payload_size
namespace wire {
inline constexpr std::array<std::uint8_t, 4> kMagic{'C', 'V', 'B', 'M'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 40;
inline constexpr std::size_t kOffVersion = 4;
inline constexpr std::size_t kOffSender = 5;
inline constexpr std::size_t kOffSeq = 8;
inline constexpr std::size_t kOffGenTime = 16;
inline constexpr std::size_t kOffLatitude = 24;
inline constexpr std::size_t kOffLongitude = 28;
inline constexpr std::size_t kOffSpeed = 32;
inline constexpr std::size_t kOffBraking = 36;
}  // namespace wire

/// Local road frame: the roadway runs due north from a fixed origin, so the
/// 1-D position maps onto latitude and longitude stays constant.
namespace geo {
inline constexpr std::int32_t kOriginLatitude = 42'280'800;    // micro-degrees
inline constexpr std::int32_t kOriginLongitude = -83'743'000;  // micro-degrees
inline constexpr double kMetresPerMicroDegree = 0.11132;

inline std::int32_t latitude_from_position(double position_m) {
  return static_cast<std::int32_t>(kOriginLatitude + std::llround(position_m / kMetresPerMicroDegree));
}
inline double position_from_latitude(std::int32_t latitude) {
  return static_cast<double>(latitude - kOriginLatitude) * kMetresPerMicroDegree;
}
}  // namespace geo

class PayloadTooSmallError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class MalformedMessageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Bsm {
  VehicleId sender = VehicleId::A;
  std::uint64_t seq = 0;
  SimTime gen_time;
  std::int32_t latitude = 0;
  std::int32_t longitude = 0;
  std::uint32_t speed_cm_s = 0;
  bool braking = false;
  std::uint32_t payload_size = wire::kHeaderSize;

  double position_m() const { return geo::position_from_latitude(latitude); }
  double speed_mps() const { return static_cast<double>(speed_cm_s) / 100.0; }

  friend bool operator==(const Bsm&, const Bsm&) = default;
};

inline Bsm build_bsm(const VehicleState& state, std::uint64_t seq, SimTime gen_time, std::size_t payload_size) {
  if (payload_size < wire::kHeaderSize) {
    throw PayloadTooSmallError("build_bsm: payload_size " + std::to_string(payload_size) + " below header size " +
                               std::to_string(wire::kHeaderSize));
  }
  Bsm b;
  b.sender = state.id;
  b.seq = seq;
  b.gen_time = gen_time;
  b.latitude = geo::latitude_from_position(state.position_m());
  b.longitude = geo::kOriginLongitude;
  // mm/s -> cm/s, rounded half away from zero
  b.speed_cm_s = static_cast<std::uint32_t>((state.speed_mm_s + 5) / 10);
  b.braking = state.braking;
  b.payload_size = static_cast<std::uint32_t>(payload_size);
  return b;
}

namespace detail {
template <typename T>
void put_be(std::vector<std::uint8_t>& out, std::size_t off, T v) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[off + sizeof(T) - 1 - i] = static_cast<std::uint8_t>(u & 0xFFu);
    u = static_cast<U>(u >> 8);
  }
}

template <typename T>
T get_be(std::span<const std::uint8_t> in, std::size_t off) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u = static_cast<U>((u << 8) | in[off + i]);
  return static_cast<T>(u);
}
}  // namespace detail

inline std::vector<std::uint8_t> encode(const Bsm& b) {
  std::vector<std::uint8_t> out(b.payload_size, 0);
  for (std::size_t i = 0; i < wire::kMagic.size(); ++i) out[i] = wire::kMagic[i];
  out[wire::kOffVersion] = wire::kVersion;
  out[wire::kOffSender] = static_cast<std::uint8_t>(b.sender);
  detail::put_be<std::uint64_t>(out, wire::kOffSeq, b.seq);
  detail::put_be<std::int64_t>(out, wire::kOffGenTime, b.gen_time.us());
  detail::put_be<std::int32_t>(out, wire::kOffLatitude, b.latitude);
  detail::put_be<std::int32_t>(out, wire::kOffLongitude, b.longitude);
  detail::put_be<std::uint32_t>(out, wire::kOffSpeed, b.speed_cm_s);
  out[wire::kOffBraking] = b.braking ? 1 : 0;
  return out;
}

inline Bsm decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < wire::kHeaderSize) {
    throw MalformedMessageError("decode: " + std::to_string(bytes.size()) + " bytes is shorter than the header");
  }
  for (std::size_t i = 0; i < wire::kMagic.size(); ++i) {
    if (bytes[i] != wire::kMagic[i]) throw MalformedMessageError("decode: bad magic");
  }
  if (bytes[wire::kOffVersion] != wire::kVersion) throw MalformedMessageError("decode: unsupported version");
  const auto sender = bytes[wire::kOffSender];
  if (sender < 1 || sender > 3) throw MalformedMessageError("decode: unknown sender");
  if (bytes[wire::kOffBraking] > 1) throw MalformedMessageError("decode: braking flag out of range");
  const auto gen = detail::get_be<std::int64_t>(bytes, wire::kOffGenTime);
  if (gen < 0) throw MalformedMessageError("decode: negative gen_time");

  Bsm b;
  b.sender = static_cast<VehicleId>(sender);
  b.seq = detail::get_be<std::uint64_t>(bytes, wire::kOffSeq);
  b.gen_time = SimTime::from_us(gen);
  b.latitude = detail::get_be<std::int32_t>(bytes, wire::kOffLatitude);
  b.longitude = detail::get_be<std::int32_t>(bytes, wire::kOffLongitude);
  b.speed_cm_s = detail::get_be<std::uint32_t>(bytes, wire::kOffSpeed);
  b.braking = bytes[wire::kOffBraking] == 1;
  b.payload_size = static_cast<std::uint32_t>(bytes.size());
  return b;
}

enum class PacketKind : std::uint8_t { Bsm, UdpFiller };
enum class Origin : std::uint8_t { Legit, Attacker };

constexpr std::string_view to_string(Origin o) noexcept { return o == Origin::Legit ? "legit" : "attacker"; }

struct Packet {
  std::uint64_t id = 0;
  PacketKind kind = PacketKind::UdpFiller;
  std::vector<std::uint8_t> body;
  SimTime sent_at;
  Origin origin = Origin::Attacker;

  std::size_t size() const noexcept { return body.size(); }
};

inline Packet build_udp_filler(std::size_t size, std::uint64_t seq) {
  Packet p;
  p.id = seq;
  p.kind = PacketKind::UdpFiller;
  p.body.assign(size, 0);
  p.origin = Origin::Attacker;
  return p;
}

}  // namespace cv2xdos
