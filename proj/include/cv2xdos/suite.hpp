#pragma once

#include "cv2xdos/metrics.hpp"
#include "cv2xdos/report.hpp"
#include "cv2xdos/runner.hpp"
#include "cv2xdos/scenario.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cv2xdos {

class UnknownParamError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

inline bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Returns the number of numeric leaves written.
inline std::size_t apply_at(nlohmann::json& node, const std::vector<std::string>& parts, std::size_t i, double value) {
  const std::string& key = parts[i];
  const bool last = i + 1 == parts.size();
  if (node.is_array()) {
    std::size_t n = 0;
    for (std::size_t k = 0; k < node.size(); ++k) {
      auto& el = node[k];
      // Array elements are picked by index, by '*', or by their "kind".
      const bool match = key == "*" || (is_index(key) && std::stoul(key) == k) ||
                         (el.is_object() && el.contains("kind") && el["kind"] == key);
      if (!match) continue;
      if (last) throw UnknownParamError("parameter path ends on an array element");
      n += apply_at(el, parts, i + 1, value);
    }
    return n;
  }
  if (!node.is_object() || !node.contains(key)) return 0;
  auto& child = node[key];
  if (last) {
    if (!child.is_number()) return 0;
    child = value;
    return 1;
  }
  return apply_at(child, parts, i + 1, value);
}

}  // namespace detail

/// Sets the numeric field at a dotted path in a scenario document. Array
/// segments accept an index, '*', or a traffic kind (attacks.udp-flood.rate).
inline void apply_override(nlohmann::json& doc, const std::string& param, double value) {
  if (param.empty()) throw UnknownParamError("empty parameter name");
  if (detail::apply_at(doc, detail::split_path(param), 0, value) == 0) {
    throw UnknownParamError("unknown or non-numeric scenario parameter '" + param + "'");
  }
}

struct SuiteRow {
  std::string file;
  MetricsReport report;
};

struct SuiteError {
  std::string file;
  std::string message;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  std::vector<SuiteError> errors;

  std::vector<MetricsReport> reports() const {
    std::vector<MetricsReport> out;
    for (const auto& r : rows) out.push_back(r.report);
    return out;
  }
};

/// Scenario files of a suite directory in run order: the list in suite.json
/// when present, otherwise every *.json file in lexicographic order.
inline std::vector<std::filesystem::path> suite_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::invalid_argument(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  const fs::path manifest = dir / "suite.json";
  if (fs::exists(manifest)) {
    const auto j = read_json_file(manifest);
    if (!j.is_object() || !j.contains("scenarios") || !j["scenarios"].is_array()) {
      throw ScenarioParseError(manifest.string() + ": expected {\"scenarios\": [...]}");
    }
    for (const auto& f : j["scenarios"]) {
      if (!f.is_string()) throw ScenarioParseError(manifest.string() + ": scenario entries must be strings");
      files.push_back(dir / f.get<std::string>());
    }
    return files;
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct SuiteOptions {
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  /// Applied to every scenario document before validation.
  std::vector<std::pair<std::string, double>> overrides;
  /// Test mode: cross-check every report against a reduction of its RunLog.
  bool verify_log = false;
};

class LogMismatchError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Throws LogMismatchError when any report field disagrees with the log.
inline void verify_against_log(const RunResult& r) {
  const LogReduction red = reduce(r.log);
  const MetricsReport& m = r.report;
  auto fail = [&](const char* what) { throw LogMismatchError(m.scenario + ": " + what + " disagrees with run log"); };
  if (red.n_sent != m.n_sent) fail("n_sent");
  if (red.n_recv != m.n_recv) fail("n_recv");
  if (red.pdr_pct() != std::optional<double>(m.pdr)) fail("pdr");
  if (red.mean_latency_ms() != m.mean_latency_ms) fail("mean_latency");
  if (red.channel_drops != m.channel_drops) fail("channel_drops");
  if (red.queue_drops != m.queue_drops) fail("queue_drops");
  if (red.last_valid_bsm != m.last_valid_bsm) fail("last_valid_bsm");
  if (red.fcw_trigger != m.fcw_trigger) fail("fcw_trigger");
}

inline Scenario load_with_overrides(const std::filesystem::path& file, const SuiteOptions& opts) {
  nlohmann::json doc = read_json_file(file);
  for (const auto& [param, value] : opts.overrides) {
    try {
      apply_override(doc, param, value);
    } catch (const UnknownParamError&) {
      // Overrides are suite-wide; a scenario without that field keeps its own.
    }
  }
  Scenario s = scenario_from_json(doc);
  if (opts.seed) s.set_seed(*opts.seed);
  return s;
}

/// Runs every scenario in `dir`. Per-file failures are collected and the suite
/// continues. Rows keep directory order regardless of completion order.
inline SuiteResult run_suite(const std::filesystem::path& dir, const SuiteOptions& opts = {}) {
  const auto files = suite_files(dir);
  struct Outcome {
    std::optional<MetricsReport> report;
    std::string error;
  };
  auto one = [&opts](const std::filesystem::path& file) -> Outcome {
    try {
      const Scenario s = load_with_overrides(file, opts);
      RunResult r = run_scenario(s, RunOptions{opts.verify_log, false, opts.verify_log});
      if (opts.verify_log) verify_against_log(r);
      return Outcome{std::move(r.report), {}};
    } catch (const std::exception& e) {
      return Outcome{std::nullopt, e.what()};
    }
  };

  std::vector<Outcome> outcomes(files.size());
  const unsigned jobs = std::max(1u, opts.jobs);
  for (std::size_t begin = 0; begin < files.size(); begin += jobs) {
    const std::size_t end = std::min(files.size(), begin + jobs);
    std::vector<std::future<Outcome>> futs;
    for (std::size_t i = begin; i < end; ++i) {
      futs.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, one, files[i]));
    }
    for (std::size_t i = begin; i < end; ++i) outcomes[i] = futs[i - begin].get();
  }

  SuiteResult out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = files[i].filename().string();
    if (outcomes[i].report) {
      out.rows.push_back(SuiteRow{name, std::move(*outcomes[i].report)});
    } else {
      out.errors.push_back(SuiteError{name, outcomes[i].error});
    }
  }
  return out;
}

inline std::string suite_table(const SuiteResult& r) {
  std::string out = fmt::format("{:<12} {:>9} {:>8} {:>10} {:>10} {:<8} {:<8}\n", "scenario", "latency", "pdr",
                                "last_bsm", "trigger", "alert", "success");
  auto secs = [](const std::optional<SimTime>& t) { return t ? fmt::format("{:.2f} s", t->seconds()) : "none"; };
  for (const auto& row : r.rows) {
    const auto& m = row.report;
    out += fmt::format("{:<12} {:>6} ms {:>7}% {:>10} {:>10} {:<8} {:<8}\n", m.scenario,
                       format_latency(m.mean_latency_ms), format_pdr(m.pdr), secs(m.last_valid_bsm),
                       secs(m.fcw_trigger), to_string(m.classification),
                       m.attack_success ? "yes" : "no");
  }
  for (const auto& e : r.errors) out += fmt::format("error: {}: {}\n", e.file, e.message);
  return out;
}

struct SweepRow {
  double value = 0.0;
  MetricsReport report;
};

/// One run per value of `param` with everything else (including the seed)
/// held fixed.
inline std::vector<SweepRow> sweep(const Scenario& base, const std::string& param, const std::vector<double>& values) {
  const nlohmann::json doc = scenario_to_json(base);
  {
    // Validate the parameter name even for an empty sweep.
    nlohmann::json probe = doc;
    apply_override(probe, param, 0.0);
  }
  std::vector<SweepRow> rows;
  for (double v : values) {
    nlohmann::json d = doc;
    apply_override(d, param, v);
    Scenario s = scenario_from_json(d);
    rows.push_back(SweepRow{v, run_scenario(s, RunOptions{false, false, false}).report});
  }
  return rows;
}

inline std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows) {
  std::string out = param + ",pdr_pct,mean_latency_ms,alert_class\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", r.value, format_pdr(r.report.pdr), format_latency(r.report.mean_latency_ms),
                       to_string(r.report.classification));
  }
  return out;
}

}  // namespace cv2xdos
