#pragma once

#include "cv2xdos/metrics.hpp"
#include "cv2xdos/runner.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cv2xdos {

inline constexpr const char* kReportCsvHeader =
    "scenario,pdr_pct,mean_latency_ms,last_valid_bsm_s,fcw_trigger_s,alert_class,attack_success,channel_drops,"
    "queue_drops";

namespace detail {
inline std::string fmt_seconds(const std::optional<SimTime>& t) {
  return t ? fmt::format("{:.2f}", t->seconds()) : std::string("none");
}
}  // namespace detail

inline std::string format_pdr(double pdr_pct) { return fmt::format("{:.1f}", pdr_pct); }

inline std::string format_latency(const std::optional<double>& ms) {
  return ms ? fmt::format("{:.0f}", *ms) : std::string("none");
}

inline std::string report_csv_row(const MetricsReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", r.scenario, format_pdr(r.pdr), format_latency(r.mean_latency_ms),
                     detail::fmt_seconds(r.last_valid_bsm), detail::fmt_seconds(r.fcw_trigger),
                     to_string(r.classification), r.attack_success ? "true" : "false", r.channel_drops,
                     r.queue_drops);
}

inline std::string report_csv(const std::vector<MetricsReport>& rows) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& r : rows) out += report_csv_row(r) + "\n";
  return out;
}

/// Same fields as the CSV row, typed, plus the counts behind PDR.
inline nlohmann::json report_json(const MetricsReport& r) {
  using nlohmann::json;
  auto opt_s = [](const std::optional<SimTime>& t) { return t ? json(std::stod(fmt::format("{:.2f}", t->seconds()))) : json(nullptr); };
  json j{{"scenario", r.scenario},
         {"pdr_pct", std::stod(format_pdr(r.pdr))},
         {"mean_latency_ms", r.mean_latency_ms ? json(std::stod(format_latency(r.mean_latency_ms))) : json(nullptr)},
         {"last_valid_bsm_s", opt_s(r.last_valid_bsm)},
         {"fcw_trigger_s", opt_s(r.fcw_trigger)},
         {"alert_class", std::string(to_string(r.classification))},
         {"attack_success", r.attack_success},
         {"channel_drops", r.channel_drops},
         {"queue_drops", r.queue_drops},
         {"n_sent", r.n_sent},
         {"n_recv", r.n_recv},
         {"ground_truth_cross_s", opt_s(r.ground_truth_cross)},
         {"spurious_alert", r.spurious_alert}};
  return j;
}

inline std::string cbr_trace_csv(const MetricsReport& r) {
  std::string out = "window_start_s,busy_fraction\n";
  for (std::size_t i = 0; i < r.cbr_trace.size(); ++i) {
    out += fmt::format("{:.3f},{:.4f}\n", (r.cbr_window * static_cast<SimTime::rep>(i)).seconds(), r.cbr_trace[i]);
  }
  return out;
}

inline std::string queue_trace_csv(const std::vector<QueueTraceEntry>& trace) {
  std::string out = "t_s,q,event\n";
  for (const auto& e : trace) out += fmt::format("{:.6f},{},{}\n", e.t.seconds(), e.q, to_string(e.event));
  return out;
}

}  // namespace cv2xdos
