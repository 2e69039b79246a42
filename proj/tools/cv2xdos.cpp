// cv2xdos: run DoS scenarios against the FCW receiver model.

#include "cv2xdos.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cv2xdos;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenario = 1;
constexpr int kExitInfeasible = 2;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed, const std::string& out_dir,
            const std::string& format, bool trace) {
  Scenario s = load_scenario(scenario);
  if (seed) s.set_seed(*seed);
  const RunResult r = run_scenario(s, RunOptions{false, trace, false});
  const std::string body =
      format == "json" ? report_json(r.report).dump(2) + "\n" : report_csv({r.report});
  if (out_dir.empty()) {
    std::cout << body;
    return kExitOk;
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file(dir / (s.name + (format == "json" ? ".json" : ".csv")), body);
  write_file(dir / (s.name + "_cbr.csv"), cbr_trace_csv(r.report));
  if (trace) write_file(dir / (s.name + "_queue.csv"), queue_trace_csv(r.queue_trace));
  return kExitOk;
}

int cmd_suite(const std::string& dir, const std::string& out_dir, std::optional<std::uint64_t> seed, unsigned jobs) {
  SuiteOptions opts;
  opts.seed = seed;
  opts.jobs = jobs;
  const SuiteResult r = run_suite(dir, opts);
  std::cout << suite_table(r);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "summary.csv", report_csv(r.reports()));
  }
  return r.errors.empty() ? kExitOk : kExitScenario;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const std::string item = list.substr(pos, comma - pos);
    if (!item.empty()) {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument("bad value '" + item + "'");
      out.push_back(v);
    }
    pos = comma + 1;
  }
  return out;
}

int cmd_sweep(const std::string& scenario, const std::string& param, const std::string& values) {
  const Scenario s = load_scenario(scenario);
  std::cout << sweep_csv(param, sweep(s, param, parse_values(values)));
  return kExitOk;
}

int cmd_calibrate(const std::string& targets_file) {
  const CalibrationTargets t = load_targets(targets_file);
  try {
    const CalibrationResult res = calibrate(t);
    nlohmann::ordered_json j{{"params", params_json(res.params)}, {"provenance", res.provenance}};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  } catch (const CalibrationInfeasible& e) {
    std::cerr << e.what() << "\nnearest miss: " << params_json(e.nearest().params).dump() << "\n";
    for (const auto& m : e.nearest().misses) std::cerr << "  " << m << "\n";
    return kExitInfeasible;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-V2X denial-of-service simulator"};
  app.require_subcommand(1);

  std::string scenario, out_dir, format = "csv", dir, param, values, targets;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Write outputs into this directory");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--trace", trace, "Also write the queue-length trace");

  auto* suite = app.add_subcommand("suite", "Run every scenario in a directory");
  suite->add_option("--dir", dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  suite->add_option("--out", out_dir, "Write summary.csv into this directory");
  suite->add_option("--seed", seed, "Override every scenario seed");
  suite->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  auto* sw = app.add_subcommand("sweep", "Vary one parameter of a scenario");
  sw->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", param, "Dotted parameter, e.g. attacks.0.rate")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();

  auto* cal = app.add_subcommand("calibrate", "Grid-search the receiver parameters against targets");
  cal->add_option("--targets", targets, "Targets JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, seed, out_dir, format, trace);
    if (*suite) return cmd_suite(dir, out_dir, seed, jobs);
    if (*sw) return cmd_sweep(scenario, param, values);
    if (*cal) return cmd_calibrate(targets);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitScenario;
  }
  return kExitOk;
}
