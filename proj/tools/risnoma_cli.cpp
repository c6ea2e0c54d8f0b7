#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "risnoma/channel.hpp"
#include "risnoma/driver.hpp"
#include "risnoma/errors.hpp"
#include "risnoma/experiment.hpp"
#include "risnoma/scenario.hpp"

using namespace risnoma;

namespace {

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw ConfigError("out", "cannot write " + path);
  return out;
}

void print_summary(const ScenarioFile& file, const Solution& s) {
  std::printf("scenario %s  method %s  seed %llu  status %s\n", file.scenario_id.c_str(), to_string(s.method),
              static_cast<unsigned long long>(s.seed), to_string(s.status));
  if (!s.message.empty()) std::printf("  %s\n", s.message.c_str());
  if (s.w.empty()) return;
  std::printf("  mbpg %.6g W (%.3f dBm), start %.6g W\n", s.mbpg, watts_to_dbm(s.mbpg), s.initial_mbpg);
  for (std::size_t l = 0; l < s.target_gains.size(); ++l)
    std::printf("  target %.1f deg: %.6g W\n", rad_to_deg(file.sys.target_angles[l]), s.target_gains[l]);
  std::printf("  sum rate %.6g bits/s/Hz, power %.6g W, AO iterations %d\n", s.sum_rate, s.power, s.ao_iterations());
  for (std::size_t k = 0; k < s.rates.size(); ++k)
    std::printf("  user %zu rate %.6g (threshold %.6g) alpha %.6g\n", k, s.rates[k], file.sys.rate_thresholds[k],
                s.noma.alpha.empty() ? 0.0 : s.noma.alpha[k]);
}

int cmd_run(const std::string& scenario_path, std::uint64_t seed, const std::string& method_name,
            const std::string& out_path) {
  const ScenarioFile file = load_scenario(scenario_path);
  const Scenario scenario = validate(file.sys, file.alg);
  const ChannelSet channels = generate(scenario, seed);
  const Solution sol = run(scenario, channels, parse_method(method_name), seed);
  print_summary(file, sol);
  if (!sol.w.empty()) std::cout << format(complexity_report(sol, scenario));
  if (!out_path.empty()) open_out(out_path) << dump_solution(file, sol);
  return sol.status == RunStatus::Optimal ? 0 : 1;
}

int cmd_sweep(const std::string& sweep_path, const std::string& scenario_override, const std::string& out_override) {
  SweepSpec spec = load_sweep(sweep_path);
  if (!scenario_override.empty()) spec.scenario_path = scenario_override;
  if (!out_override.empty()) spec.output = out_override;
  if (spec.scenario_path.empty()) throw ConfigError("scenario", "sweep names no scenario");
  const ScenarioFile base = load_scenario(spec.scenario_path);
  const SweepResult res = run_sweep(spec, base);

  auto csv = open_out(spec.output);
  write_csv(res.rows, csv);
  open_out(spec.output + ".meta.json") << sweep_metadata(spec, base);
  if (spec.axis == SweepAxis::AngleScan) {
    auto scan = open_out(spec.output + ".scan.csv");
    write_scan_csv(res.scans, scan);
  }
  int optimal = 0;
  for (const auto& r : res.rows) optimal += r.status == RunStatus::Optimal;
  std::printf("%s: %zu rows, %d Optimal -> %s\n", spec.sweep_id.c_str(), res.rows.size(), optimal,
              spec.output.c_str());
  return optimal == static_cast<int>(res.rows.size()) ? 0 : 1;
}

int cmd_scan(const std::string& solution_path, double resolution, const std::string& out_path) {
  std::ifstream in(solution_path);
  if (!in) throw ConfigError("solution", "cannot open " + solution_path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const SavedSolution saved = parse_solution(text);
  const Solution& sol = saved.solution;
  if (sol.w.empty()) throw ConfigError("solution", "run has no beamformers");
  const Scenario scenario = validate(saved.scenario.sys, saved.scenario.alg);
  const ChannelSet channels = generate(scenario, sol.seed);
  std::vector<ScanRow> rows;
  for (const auto& s : angle_scan(sol, channels, resolution))
    rows.push_back({saved.scenario.scenario_id, sol.seed, sol.method, resolution, s});
  if (out_path.empty()) {
    write_scan_csv(rows, std::cout);
  } else {
    auto out = open_out(out_path);
    write_scan_csv(rows, out);
  }
  return sol.status == RunStatus::Optimal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted hybrid NOMA ISAC beampattern optimizer"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string scenario_path, sweep_path, solution_path, out_path, method = "PAO";
  std::uint64_t seed = 1;
  double resolution = 0.5;

  auto* run_cmd = app.add_subcommand("run", "optimize one channel realization");
  run_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "channel and phase seed");
  run_cmd->add_option("--method", method, "PAO, NoSIC, MRT, RPS or RadarOnly");
  run_cmd->add_option("--out", out_path, "write the solution JSON here");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep file and write CSV");
  sweep_cmd->add_option("--sweep", sweep_path, "sweep JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--scenario", scenario_path, "override the sweep's scenario");
  sweep_cmd->add_option("--out", out_path, "override the sweep's output CSV");

  auto* scan_cmd = app.add_subcommand("scan", "angle scan of a saved solution");
  scan_cmd->add_option("--solution", solution_path, "solution JSON from `run --out`")
      ->required()
      ->check(CLI::ExistingFile);
  scan_cmd->add_option("--resolution", resolution, "degrees");
  scan_cmd->add_option("--out", out_path, "CSV path, stdout if absent");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(scenario_path, seed, method, out_path);
    if (*sweep_cmd) return cmd_sweep(sweep_path, scenario_path, out_path);
    if (*scan_cmd) return cmd_scan(solution_path, resolution, out_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
