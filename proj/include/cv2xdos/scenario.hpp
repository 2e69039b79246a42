#pragma once

#include "cv2xdos/channel.hpp"
#include "cv2xdos/fcw.hpp"
#include "cv2xdos/kinematics.hpp"
#include "cv2xdos/receiver.hpp"
#include "cv2xdos/sim_time.hpp"
#include "cv2xdos/traffic.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cv2xdos {

/// Raised for unreadable or syntactically broken scenario files.
class ScenarioParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a scenario parses but breaks a field constraint. `field()` is
/// the dotted path of the offending key.
class ScenarioValidationError : public std::invalid_argument {
public:
  ScenarioValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

struct VehicleSpec {
  double position = 0.0;  // metres
  double speed = 0.0;     // m/s
  bool braking = false;
};

struct Scenario {
  std::string name;
  SimTime run_end;
  VehicleSpec vehicle_a;
  VehicleSpec vehicle_b;
  std::optional<VehicleSpec> attacker_vehicle;  // defaults to vehicle_b's spot
  TrafficSpec legit;
  std::vector<TrafficSpec> attacks;
  ChannelParams channel;
  QueueParams queue;
  FcwConfig fcw;
  std::uint64_t seed = 1;
  bool channel_seed_explicit = false;

  /// Pins the seed of every stochastic component.
  void set_seed(std::uint64_t s) {
    seed = s;
    channel.seed = s;
    channel_seed_explicit = false;
  }
};

using json = nlohmann::json;

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ScenarioValidationError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

inline const json& require(const json& obj, const std::string& where, const char* key) {
  const std::string path = where.empty() ? key : where + "." + key;
  if (!obj.is_object() || !obj.contains(key)) throw ScenarioValidationError(path, "missing required field");
  return obj.at(key);
}

inline double number(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  const std::string path = where.empty() ? key : where + "." + key;
  if (!v.is_number()) throw ScenarioValidationError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioValidationError(path, "must be finite");
  return d;
}

inline double non_negative(const json& obj, const std::string& where, const char* key) {
  const double d = number(obj, where, key);
  if (d < 0.0) throw ScenarioValidationError(where + "." + key, "must be >= 0");
  return d;
}

inline double positive(const json& obj, const std::string& where, const char* key) {
  const double d = number(obj, where, key);
  if (!(d > 0.0)) throw ScenarioValidationError(where.empty() ? key : where + "." + key, "must be > 0");
  return d;
}

inline std::uint64_t integer(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  const std::string path = where.empty() ? key : where + "." + key;
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ScenarioValidationError(path, "must be >= 0");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 9.0e15) return static_cast<std::uint64_t>(d);
  }
  throw ScenarioValidationError(path, "expected a non-negative integer");
}

inline std::string string(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_string()) throw ScenarioValidationError(where.empty() ? key : where + "." + key, "expected a string");
  return v.get<std::string>();
}

inline VehicleSpec vehicle_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ScenarioValidationError(where, "expected an object");
  reject_unknown(j, where, {"position", "speed", "braking"});
  VehicleSpec v;
  v.position = number(j, where, "position");
  v.speed = non_negative(j, where, "speed");
  if (j.contains("braking")) {
    if (!j.at("braking").is_boolean()) throw ScenarioValidationError(where + ".braking", "expected a boolean");
    v.braking = j.at("braking").get<bool>();
  }
  return v;
}

inline TrafficKind traffic_kind_from(const std::string& s, const std::string& path) {
  if (s == "legit-bsm") return TrafficKind::LegitBsm;
  if (s == "udp-flood") return TrafficKind::UdpFlood;
  if (s == "bsm-flood") return TrafficKind::BsmFlood;
  throw ScenarioValidationError(path, "unknown traffic kind '" + s + "'");
}

inline TrafficSpec traffic_from_json(const json& j, const std::string& where, bool is_legit) {
  if (!j.is_object()) throw ScenarioValidationError(where, "expected an object");
  reject_unknown(j, where, {"kind", "rate", "start", "duration", "payload_size", "origin"});
  TrafficSpec t;
  t.kind = traffic_kind_from(string(j, where, "kind"), where + ".kind");
  // An attack stream with rate 0 is idle; the legit stream must emit.
  t.rate = is_legit ? positive(j, where, "rate") : non_negative(j, where, "rate");
  t.start = SimTime::from_seconds(non_negative(j, where, "start"));
  t.duration = SimTime::from_seconds(non_negative(j, where, "duration"));
  t.payload_size = integer(j, where, "payload_size");
  t.origin = is_legit ? Origin::Legit : Origin::Attacker;
  if (j.contains("origin")) {
    const std::string o = string(j, where, "origin");
    if (o != to_string(t.origin)) {
      throw ScenarioValidationError(where + ".origin", "must be '" + std::string(to_string(t.origin)) + "'");
    }
  }
  if (is_legit && t.kind != TrafficKind::LegitBsm) {
    throw ScenarioValidationError(where + ".kind", "legit stream must be legit-bsm");
  }
  if (!is_legit && t.kind == TrafficKind::LegitBsm) {
    throw ScenarioValidationError(where + ".kind", "attacks must be udp-flood or bsm-flood");
  }
  if (t.carries_bsm() && t.payload_size < wire::kHeaderSize) {
    throw ScenarioValidationError(where + ".payload_size", "BSM payload must be >= 40 bytes");
  }
  return t;
}

inline json vehicle_to_json(const VehicleSpec& v) {
  return json{{"position", v.position}, {"speed", v.speed}, {"braking", v.braking}};
}

inline json traffic_to_json(const TrafficSpec& t) {
  return json{{"kind", std::string(to_string(t.kind))},
              {"rate", t.rate},
              {"start", t.start.seconds()},
              {"duration", t.duration.seconds()},
              {"payload_size", t.payload_size},
              {"origin", std::string(to_string(t.origin))}};
}

}  // namespace detail

/// Builds and validates a Scenario from its JSON form. Unknown keys are errors.
///
/// Units: times in seconds except channel delays/window (ms) and queue
/// t_base/c_byte (us); distances in metres; speeds in m/s; sizes in bytes.
inline Scenario scenario_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw ScenarioValidationError("<root>", "expected an object");
  reject_unknown(j, "", {"name", "run_end", "seed", "vehicle_a", "vehicle_b", "attacker_vehicle", "legit", "attacks",
                         "channel", "queue", "fcw"});
  Scenario s;
  s.name = string(j, "", "name");
  if (s.name.empty()) throw ScenarioValidationError("name", "must not be empty");
  s.run_end = SimTime::from_seconds(positive(j, "", "run_end"));
  s.seed = integer(j, "", "seed");
  s.vehicle_a = vehicle_from_json(require(j, "", "vehicle_a"), "vehicle_a");
  s.vehicle_b = vehicle_from_json(require(j, "", "vehicle_b"), "vehicle_b");
  if (s.vehicle_b.position < s.vehicle_a.position) {
    throw ScenarioValidationError("vehicle_b.position", "lead vehicle must start ahead of vehicle_a");
  }
  if (j.contains("attacker_vehicle")) s.attacker_vehicle = vehicle_from_json(j.at("attacker_vehicle"), "attacker_vehicle");

  s.legit = traffic_from_json(require(j, "", "legit"), "legit", true);
  const json& attacks = require(j, "", "attacks");
  if (!attacks.is_array()) throw ScenarioValidationError("attacks", "expected an array");
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    s.attacks.push_back(traffic_from_json(attacks[i], "attacks." + std::to_string(i), false));
  }

  const json& ch = require(j, "", "channel");
  if (!ch.is_object()) throw ScenarioValidationError("channel", "expected an object");
  reject_unknown(ch, "channel", {"airtime_capacity", "delay_min", "delay_max", "window", "seed"});
  s.channel.airtime_capacity = positive(ch, "channel", "airtime_capacity");
  s.channel.delay_min = SimTime::from_seconds(non_negative(ch, "channel", "delay_min") / 1e3);
  s.channel.delay_max = SimTime::from_seconds(non_negative(ch, "channel", "delay_max") / 1e3);
  if (s.channel.delay_max < s.channel.delay_min) {
    throw ScenarioValidationError("channel.delay_max", "must be >= channel.delay_min");
  }
  s.channel.window = SimTime::from_seconds(positive(ch, "channel", "window") / 1e3);
  if (s.channel.window <= SimTime{}) throw ScenarioValidationError("channel.window", "must be at least 1 us");
  if (ch.contains("seed")) {
    s.channel.seed = integer(ch, "channel", "seed");
    s.channel_seed_explicit = true;
  } else {
    s.channel.seed = s.seed;
  }

  const json& q = require(j, "", "queue");
  if (!q.is_object()) throw ScenarioValidationError("queue", "expected an object");
  reject_unknown(q, "queue", {"capacity_msgs", "t_base", "c_byte", "lambda_pc5"});
  s.queue.capacity_msgs = integer(q, "queue", "capacity_msgs");
  if (s.queue.capacity_msgs == 0) throw ScenarioValidationError("queue.capacity_msgs", "must be > 0");
  // Processing costs resolve to whole microseconds.
  const double t_base = positive(q, "queue", "t_base");
  if (t_base != std::floor(t_base)) throw ScenarioValidationError("queue.t_base", "must be a whole number of us");
  s.queue.t_base = SimTime::from_us(static_cast<SimTime::rep>(t_base));
  const double c_byte = non_negative(q, "queue", "c_byte");
  if (c_byte != std::floor(c_byte)) throw ScenarioValidationError("queue.c_byte", "must be a whole number of us");
  s.queue.c_byte = SimTime::from_us(static_cast<SimTime::rep>(c_byte));
  s.queue.lambda_pc5 = positive(q, "queue", "lambda_pc5");

  const json& f = require(j, "", "fcw");
  if (!f.is_object()) throw ScenarioValidationError("fcw", "expected an object");
  reject_unknown(f, "fcw", {"ttc_threshold", "critical_zone", "grace"});
  s.fcw.ttc_threshold = positive(f, "fcw", "ttc_threshold");
  s.fcw.critical_zone = positive(f, "fcw", "critical_zone");
  s.fcw.grace = positive(f, "fcw", "grace");
  return s;
}

inline json scenario_to_json(const Scenario& s) {
  using namespace detail;
  json attacks = json::array();
  for (const auto& a : s.attacks) attacks.push_back(traffic_to_json(a));
  json channel{{"airtime_capacity", s.channel.airtime_capacity},
               {"delay_min", s.channel.delay_min.milliseconds()},
               {"delay_max", s.channel.delay_max.milliseconds()},
               {"window", s.channel.window.milliseconds()}};
  if (s.channel_seed_explicit) channel["seed"] = s.channel.seed;
  json j{{"name", s.name},
         {"run_end", s.run_end.seconds()},
         {"seed", s.seed},
         {"vehicle_a", vehicle_to_json(s.vehicle_a)},
         {"vehicle_b", vehicle_to_json(s.vehicle_b)},
         {"legit", traffic_to_json(s.legit)},
         {"attacks", attacks},
         {"channel", channel},
         {"queue",
          {{"capacity_msgs", s.queue.capacity_msgs},
           {"t_base", static_cast<double>(s.queue.t_base.us())},
           {"c_byte", static_cast<double>(s.queue.c_byte.us())},
           {"lambda_pc5", s.queue.lambda_pc5}}},
         {"fcw",
          {{"ttc_threshold", s.fcw.ttc_threshold}, {"critical_zone", s.fcw.critical_zone}, {"grace", s.fcw.grace}}}};
  if (s.attacker_vehicle) j["attacker_vehicle"] = vehicle_to_json(*s.attacker_vehicle);
  return j;
}

/// Reads a JSON document, turning syntax errors into ScenarioParseError with
/// the line and column of the failure.
inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioParseError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                             ": parse error: " + e.what());
  }
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return scenario_from_json(j);
  } catch (const ScenarioValidationError& e) {
    throw ScenarioValidationError(e.field(), path.string() + ": " + std::string(e.what()).substr(e.field().size() + 2));
  }
}

}  // namespace cv2xdos
