// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include "cv2xdos.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace cv2xdos;
using namespace cv2xdos::literals;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios{CV2XDOS_SCENARIO_DIR};

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::map<std::string, MetricsReport> suite_by_name() {
  std::map<std::string, MetricsReport> out;
  SuiteOptions opts;
  opts.verify_log = true;
  const SuiteResult r = run_suite(kScenarios, opts);
  if (!r.errors.empty()) throw std::runtime_error(r.errors[0].file + ": " + r.errors[0].message);
  for (const auto& row : r.rows) out[row.report.scenario] = row.report;
  return out;
}

double lat(const MetricsReport& m) { return m.mean_latency_ms.value_or(-1.0); }

Outcome baseline_quality() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_scenario(load_scenario(kScenarios / "baseline.json"));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& m = r.report;
  o.check(m.pdr >= 99.0, fmt::format("pdr {:.1f} < 99", m.pdr));
  o.check(lat(m) >= 25.0 && lat(m) <= 50.0, fmt::format("latency {:.1f} ms outside [25, 50]", lat(m)));
  o.check(m.classification == AlertClass::Timely, "alert not timely");
  o.check(wall < 10.0, fmt::format("wall clock {:.2f} s", wall));
  o.detail = o.pass ? fmt::format("pdr {:.1f}%, latency {:.0f} ms, timely, {:.2f} s wall", m.pdr, lat(m), wall) : o.detail;
  return o;
}

Outcome alert_pattern(const std::map<std::string, MetricsReport>& s) {
  Outcome o;
  const std::vector<std::pair<std::string, AlertClass>> want{
      {"baseline", AlertClass::Timely}, {"udp2min", AlertClass::Delayed}, {"udp5min", AlertClass::Missed},
      {"bsm500", AlertClass::Delayed},  {"bsm1000", AlertClass::Missed},  {"combo500", AlertClass::Missed},
      {"combo1000", AlertClass::Missed}};
  std::string got;
  for (const auto& [name, cls] : want) {
    const auto& m = s.at(name);
    o.check(m.classification == cls, fmt::format("{} {} != {}", name, to_string(m.classification), to_string(cls)));
    o.check(m.attack_success == (cls != AlertClass::Timely), name + " attack_success flag");
    got += fmt::format("{}{}={}", got.empty() ? "" : " ", name, to_string(m.classification));
  }
  if (o.pass) o.detail = got;
  return o;
}

Outcome threshold_violations(const std::map<std::string, MetricsReport>& s) {
  Outcome o;
  for (const auto& [name, m] : s) {
    if (name == "baseline") continue;
    o.check(m.pdr < 90.0 || lat(m) > 50.0, fmt::format("{} meets both pdr ({:.1f}) and latency ({:.0f} ms)", name, m.pdr, lat(m)));
  }
  const auto& c1000 = s.at("combo1000");
  for (const auto& [name, m] : s) {
    if (name != "combo1000") o.check(c1000.pdr < m.pdr, "combo1000 pdr not strictly below " + name);
  }
  if (o.pass) o.detail = fmt::format("all 6 attack runs violate a threshold, combo1000 lowest pdr ({:.1f}%)", c1000.pdr);
  return o;
}

Outcome orderings(const std::map<std::string, MetricsReport>& s) {
  Outcome o;
  auto pdr_of = [&](const char* n) { return s.at(n).pdr; };
  auto lat_of = [&](const char* n) { return lat(s.at(n)); };
  o.check(pdr_of("bsm1000") < pdr_of("bsm500"), "pdr bsm1000 !< bsm500");
  o.check(pdr_of("udp5min") < pdr_of("udp2min"), "pdr udp5min !< udp2min");
  o.check(pdr_of("combo500") <= pdr_of("bsm500"), "pdr combo500 !<= bsm500");
  o.check(pdr_of("combo1000") <= pdr_of("bsm1000"), "pdr combo1000 !<= bsm1000");
  o.check(lat_of("bsm1000") > lat_of("bsm500"), "latency bsm1000 !> bsm500");
  o.check(lat_of("udp5min") > lat_of("udp2min"), "latency udp5min !> udp2min");
  o.check(lat_of("combo500") >= lat_of("bsm500"), "latency combo500 !>= bsm500");
  o.check(lat_of("combo1000") >= lat_of("bsm1000"), "latency combo1000 !>= bsm1000");
  if (o.pass) o.detail = "pdr falls and latency rises with flood rate, duration and combination";
  return o;
}

Outcome queue_model() {
  Outcome o;
  // (a) Windowed balance against a simulated queue.
  {
    QueueParams p;
    p.capacity_msgs = 128;
    p.t_base = 1_us;
    p.c_byte = 0_us;
    p.lambda_pc5 = 1e6;
    ReceiverQueue q(p);
    std::mt19937_64 gen(5);
    std::uint64_t model = 0;
    SimTime t{};
    for (int w = 0; w < 1000 && o.pass; ++w) {
      const std::uint64_t want = gen() % 80;
      std::uint64_t dispatched = 0;
      for (std::uint64_t k = 0; k < want; ++k) {
        const auto d = q.dispatch_next(t);
        if (!d) break;
        t = d->completed_at;
        ++dispatched;
      }
      const std::uint64_t arrivals = gen() % 80;
      for (std::uint64_t k = 0; k < arrivals; ++k) q.enqueue(build_udp_filler(0, k), t);
      model = step_balance(model, arrivals, dispatched, p.capacity_msgs);
      o.check(q.size() == model, fmt::format("window {}: queue {} vs balance {}", w, q.size(), model));
      o.check(q.conserved(), "conservation");
      t += 1_ms;
    }
  }
  // (b) Every report field reproduced from the event log alone.
  for (const auto& f : suite_files(kScenarios)) {
    try {
      verify_against_log(run_scenario(load_scenario(f)));
    } catch (const std::exception& e) {
      o.check(false, e.what());
    }
  }
  // (c) Saturated receiver drains at 1/T for 600-byte messages.
  double rate = 0.0;
  {
    QueueParams p;
    p.capacity_msgs = 256;
    p.t_base = 50_us;
    p.c_byte = 1_us;
    p.lambda_pc5 = 2000;
    ReceiverQueue q(p);
    SimTime t{};
    std::uint64_t served = 0;
    std::uint64_t next_id = 0;
    const SimTime horizon = 10_s;
    while (t < horizon) {
      while (q.size() < p.capacity_msgs) q.enqueue(build_udp_filler(600, next_id++), t);
      const auto d = q.dispatch_next(t);
      t = d->completed_at;
      if (t <= horizon) ++served;
    }
    rate = static_cast<double>(served) / horizon.seconds();
    const double expect = 1e6 / static_cast<double>(processing_time(600, p).us());
    o.check(std::abs(rate - expect) / expect <= 0.01, fmt::format("saturated rate {:.1f} vs {:.1f}", rate, expect));
    o.check(rate < p.lambda_pc5, "saturated rate not below the PC5 bound");
  }
  if (o.pass) o.detail = fmt::format("1000 windows match, 7 logs reduce exactly, saturated rate {:.1f}/s", rate);
  return o;
}

Outcome fcw_latency_bound() {
  Outcome o;
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> d0s(40.0, 600.0), vas(5.0, 35.0);
  double worst_ms = 0.0;
  for (int i = 0; i < 150; ++i) {
    const double d0 = d0s(gen);
    const double va = vas(gen);
    Scenario s = load_scenario(kScenarios / "baseline.json");
    s.name = fmt::format("case{}", i);
    s.vehicle_a = VehicleSpec{0.0, va, false};
    s.vehicle_b = VehicleSpec{d0, 0.0, false};
    s.run_end = SimTime::from_seconds(d0 / va + 1.0);
    s.legit.start = 0_s;
    s.legit.duration = s.run_end;
    s.attacks.clear();
    s.channel.delay_min = s.channel.delay_max = 0_us;
    s.channel.airtime_capacity = 1e6;
    const auto r = run_scenario(s, RunOptions{false, false, false});
    const auto cross = r.report.ground_truth_cross;
    const SimTime bound = 100_ms + service_time(s.legit.payload_size, s.queue);
    if (!cross || !r.report.fcw_trigger) {
      o.check(false, s.name + ": no crossing or no alert");
      continue;
    }
    const SimTime lag = *r.report.fcw_trigger - *cross;
    worst_ms = std::max(worst_ms, lag.milliseconds());
    o.check(lag <= bound, fmt::format("{} (d0 {:.2f}, vA {:.2f}): lag {:.3f} ms", s.name, d0, va, lag.milliseconds()));

    // Closed form against 1 ms stepping of the true motion.
    const auto a0 = VehicleState::make(VehicleId::A, 0.0, va);
    const auto b0 = VehicleState::make(VehicleId::B, d0, 0.0);
    SimTime t{};
    while (static_cast<double>(b0.position_nm - advance(a0, t).position_nm) / 1e9 / a0.speed_mps() > 3.0) t += 1_ms;
    o.check(t >= *cross && t - *cross <= 1_ms, s.name + ": closed form disagrees with stepping");
  }
  if (o.pass) o.detail = fmt::format("150 cases, worst alert lag {:.1f} ms", worst_ms);
  return o;
}

Outcome reproducible() {
  Outcome o;
  std::vector<std::string> csv;
  for (int i = 0; i < 3; ++i) csv.push_back(report_csv(run_suite(kScenarios).reports()));
  o.check(csv[0] == csv[1] && csv[1] == csv[2], "suite CSV differs between runs");
  o.check(csv[0].size() > std::string(kReportCsvHeader).size() + 1, "suite CSV is empty");
  if (o.pass) o.detail = fmt::format("3 runs, {} identical bytes", csv[0].size());
  return o;
}

Outcome littles_law() {
  Outcome o;
  QueueParams p;  // default receiver
  const std::size_t size = 200;
  const double service_s = service_time(size, p).seconds();
  const double lambda = 0.8 / service_s * 0.95;  // utilisation 0.76
  const SimTime horizon = 120_s;

  Engine eng;
  ReceiverQueue q(p);
  std::mt19937_64 gen(2718);
  std::exponential_distribution<double> gap(lambda);

  // Time-integral of the number in system (waiting plus in service).
  std::int64_t in_system = 0;
  SimTime last{};
  long double area = 0;
  auto account = [&] {
    area += static_cast<long double>(in_system) * static_cast<long double>((eng.now() - last).us());
    last = eng.now();
  };
  long double sojourn_sum = 0;
  std::uint64_t completed = 0;
  bool serving = false;
  std::function<void()> serve = [&] {
    const auto d = q.dispatch_next(eng.now());
    if (!d) return;
    serving = true;
    const SimTime arrived = d->enqueued_at;
    eng.schedule(d->completed_at, EventKind::QueueDispatch, [&, arrived] {
      account();
      --in_system;
      sojourn_sum += static_cast<long double>((eng.now() - arrived).us());
      ++completed;
      serving = false;
      serve();
    });
  };
  std::uint64_t id = 0;
  std::function<void()> arrive = [&] {
    account();
    if (q.enqueue(build_udp_filler(size, id++), eng.now()) == EnqueueResult::Accepted) ++in_system;
    if (!serving) serve();
    const SimTime next = eng.now() + SimTime::from_seconds(gap(gen));
    if (next < horizon) eng.schedule(next, EventKind::PacketArrival, arrive);
  };
  eng.schedule(0_us, EventKind::PacketArrival, arrive);
  eng.run_until(horizon * 2);  // drain

  const double span = last.seconds();
  const double L = static_cast<double>(area / 1e6L) / span;
  const double W = static_cast<double>(sojourn_sum / static_cast<long double>(completed)) / 1e6;
  const double lambda_eff = static_cast<double>(completed) / span;
  const double util = lambda_eff * service_s;
  const double err = std::abs(L - lambda_eff * W) / (lambda_eff * W);
  o.check(util <= 0.8, fmt::format("utilisation {:.3f} > 0.8", util));
  o.check(span >= 60.0, "run shorter than 60 s");
  o.check(err <= 0.10, fmt::format("L {:.4f} vs lambda*W {:.4f}", L, lambda_eff * W));
  if (o.pass) {
    o.detail = fmt::format("L {:.4f}, lambda*W {:.4f} (rel err {:.2e}), utilisation {:.3f}", L, lambda_eff * W, err, util);
  }
  return o;
}

}  // namespace

int main() {
  std::map<std::string, MetricsReport> suite;
  std::string suite_error;
  try {
    suite = suite_by_name();
  } catch (const std::exception& e) {
    suite_error = e.what();
  }
  auto needs_suite = [&](std::function<Outcome(const std::map<std::string, MetricsReport>&)> f) {
    return [&, f] { return suite_error.empty() ? f(suite) : Outcome{false, "suite failed: " + suite_error}; };
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 baseline delivery, latency and runtime", baseline_quality},
      {"C2 alert classification pattern", needs_suite(alert_pattern)},
      {"C3 attack runs violate a threshold; combined flood has lowest pdr", needs_suite(threshold_violations)},
      {"C4 severity orderings", needs_suite(orderings)},
      {"C5 queue model consistency", queue_model},
      {"C6 alert lag bound on an ideal link", fcw_latency_bound},
      {"C7 byte-identical suite output", reproducible},
      {"C8 Little's law on the receiver queue", littles_law},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
