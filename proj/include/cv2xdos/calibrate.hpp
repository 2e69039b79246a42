#pragma once

#include "cv2xdos/fcw.hpp"
#include "cv2xdos/report.hpp"
#include "cv2xdos/scenario.hpp"
#include "cv2xdos/suite.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cv2xdos {

using ParamSet = std::vector<std::pair<std::string, double>>;

struct GridAxis {
  std::string param;
  std::vector<double> values;
};

/// What a calibrated parameter set has to reproduce.
struct CalibrationTargets {
  std::filesystem::path scenario_dir;
  std::string baseline = "baseline";
  double baseline_pdr_min = 99.0;
  double latency_min_ms = 25.0;
  double latency_max_ms = 50.0;
  std::map<std::string, AlertClass> alert_classes;
  std::map<std::string, double> pdr_min;
  std::vector<GridAxis> grid;
  std::optional<std::uint64_t> seed;
};

struct CandidateEvaluation {
  ParamSet params;
  std::vector<std::string> misses;
  std::vector<MetricsReport> reports;
};

struct CalibrationResult {
  ParamSet params;
  std::vector<MetricsReport> reports;
  std::size_t evaluated = 0;
  std::size_t grid_size = 0;
  std::string provenance;
};

class CalibrationInfeasible : public std::runtime_error {
public:
  CalibrationInfeasible(const std::string& what, CandidateEvaluation nearest)
      : std::runtime_error(what), nearest_(std::move(nearest)) {}
  const CandidateEvaluation& nearest() const noexcept { return nearest_; }

private:
  CandidateEvaluation nearest_;
};

inline AlertClass alert_class_from(const std::string& s) {
  if (s == "timely") return AlertClass::Timely;
  if (s == "delayed") return AlertClass::Delayed;
  if (s == "missed") return AlertClass::Missed;
  throw ScenarioValidationError("alert_classes", "unknown alert class '" + s + "'");
}

/// Targets file; a relative scenario_dir resolves against the file's directory.
inline CalibrationTargets load_targets(const std::filesystem::path& path) {
  using detail::number;
  const auto j = read_json_file(path);
  if (!j.is_object()) throw ScenarioValidationError("<root>", "expected an object");
  detail::reject_unknown(j, "", {"scenario_dir", "baseline", "alert_classes", "pdr_min", "grid", "seed"});
  CalibrationTargets t;
  const std::filesystem::path dir = detail::string(j, "", "scenario_dir");
  t.scenario_dir = dir.is_absolute() ? dir : path.parent_path() / dir;
  if (j.contains("baseline")) {
    const auto& b = j["baseline"];
    detail::reject_unknown(b, "baseline", {"scenario", "pdr_min", "latency_ms"});
    if (b.contains("scenario")) t.baseline = detail::string(b, "baseline", "scenario");
    if (b.contains("pdr_min")) t.baseline_pdr_min = number(b, "baseline", "pdr_min");
    if (b.contains("latency_ms")) {
      const auto& l = b["latency_ms"];
      if (!l.is_array() || l.size() != 2 || !l[0].is_number() || !l[1].is_number()) {
        throw ScenarioValidationError("baseline.latency_ms", "expected [min, max]");
      }
      t.latency_min_ms = l[0].get<double>();
      t.latency_max_ms = l[1].get<double>();
    }
  }
  if (j.contains("alert_classes")) {
    for (const auto& [name, cls] : j["alert_classes"].items()) {
      if (!cls.is_string()) throw ScenarioValidationError("alert_classes." + name, "expected a string");
      t.alert_classes[name] = alert_class_from(cls.get<std::string>());
    }
  }
  if (j.contains("pdr_min")) {
    for (const auto& [name, v] : j["pdr_min"].items()) {
      if (!v.is_number()) throw ScenarioValidationError("pdr_min." + name, "expected a number");
      t.pdr_min[name] = v.get<double>();
    }
  }
  const auto& grid = detail::require(j, "", "grid");
  if (!grid.is_array()) throw ScenarioValidationError("grid", "expected an array of {param, values}");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::string where = "grid." + std::to_string(i);
    detail::reject_unknown(grid[i], where, {"param", "values"});
    GridAxis axis{detail::string(grid[i], where, "param"), {}};
    const auto& vals = detail::require(grid[i], where, "values");
    if (!vals.is_array() || vals.empty()) throw ScenarioValidationError(where + ".values", "expected a non-empty array");
    for (const auto& v : vals) {
      if (!v.is_number()) throw ScenarioValidationError(where + ".values", "expected numbers");
      axis.values.push_back(v.get<double>());
    }
    t.grid.push_back(std::move(axis));
  }
  if (j.contains("seed")) t.seed = detail::integer(j, "", "seed");
  return t;
}

/// Runs the scenario suite under `params` and lists every unmet target.
inline CandidateEvaluation evaluate_candidate(const CalibrationTargets& t, const ParamSet& params) {
  SuiteOptions opts;
  opts.overrides = params;
  opts.seed = t.seed;
  const SuiteResult suite = run_suite(t.scenario_dir, opts);
  CandidateEvaluation ev{params, {}, suite.reports()};
  for (const auto& e : suite.errors) ev.misses.push_back(e.file + ": " + e.message);

  std::map<std::string, const MetricsReport*> by_name;
  for (const auto& r : ev.reports) by_name[r.scenario] = &r;

  if (const auto it = by_name.find(t.baseline); it == by_name.end()) {
    ev.misses.push_back("baseline scenario '" + t.baseline + "' not found");
  } else {
    const MetricsReport& b = *it->second;
    if (b.pdr < t.baseline_pdr_min) ev.misses.push_back(fmt::format("baseline pdr {:.1f} < {}", b.pdr, t.baseline_pdr_min));
    if (!b.mean_latency_ms || *b.mean_latency_ms < t.latency_min_ms || *b.mean_latency_ms > t.latency_max_ms) {
      ev.misses.push_back(fmt::format("baseline latency {} ms outside [{}, {}]", format_latency(b.mean_latency_ms),
                                      t.latency_min_ms, t.latency_max_ms));
    }
  }
  for (const auto& [name, cls] : t.alert_classes) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) {
      ev.misses.push_back("scenario '" + name + "' not found");
    } else if (it->second->classification != cls) {
      ev.misses.push_back(fmt::format("{}: alert {} != {}", name, to_string(it->second->classification), to_string(cls)));
    }
  }
  for (const auto& [name, lo] : t.pdr_min) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) {
      ev.misses.push_back("scenario '" + name + "' not found");
    } else if (it->second->pdr < lo) {
      ev.misses.push_back(fmt::format("{}: pdr {:.1f} < {}", name, it->second->pdr, lo));
    }
  }
  return ev;
}

/// Grid search in odometer order (first axis outermost). Returns the first
/// candidate that meets every target; throws CalibrationInfeasible carrying the
/// candidate with the fewest misses otherwise.
inline CalibrationResult calibrate(const CalibrationTargets& t) {
  if (t.grid.empty()) throw ScenarioValidationError("grid", "needs at least one axis");
  std::size_t total = 1;
  for (const auto& axis : t.grid) total *= axis.values.size();

  std::vector<std::size_t> idx(t.grid.size(), 0);
  std::optional<CandidateEvaluation> nearest;
  for (std::size_t n = 0; n < total; ++n) {
    ParamSet params;
    for (std::size_t k = 0; k < t.grid.size(); ++k) params.emplace_back(t.grid[k].param, t.grid[k].values[idx[k]]);
    CandidateEvaluation ev = evaluate_candidate(t, params);
    if (ev.misses.empty()) {
      CalibrationResult res{std::move(ev.params), std::move(ev.reports), n + 1, total, {}};
      res.provenance = fmt::format(
          "first feasible candidate ({} of {}) of a grid search: baseline pdr >= {} and latency in [{}, {}] ms, "
          "plus {} alert-class and {} pdr targets",
          n + 1, total, t.baseline_pdr_min, t.latency_min_ms, t.latency_max_ms, t.alert_classes.size(),
          t.pdr_min.size());
      return res;
    }
    if (!nearest || ev.misses.size() < nearest->misses.size()) nearest = std::move(ev);
    for (std::size_t k = t.grid.size(); k-- > 0;) {
      if (++idx[k] < t.grid[k].values.size()) break;
      idx[k] = 0;
    }
  }
  throw CalibrationInfeasible(fmt::format("calibration infeasible over {} candidates; nearest miss has {} unmet targets",
                                          total, nearest->misses.size()),
                              std::move(*nearest));
}

inline nlohmann::ordered_json params_json(const ParamSet& params) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

}  // namespace cv2xdos
