#include "risnoma/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "risnoma/errors.hpp"

namespace risnoma {

using nlohmann::json;

const char* version() { return RISNOMA_VERSION; }

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::RisElements: return "ris_elements";
    case SweepAxis::TransmitPowerDbm: return "transmit_power_dbm";
    case SweepAxis::AngleScan: return "angle_scan";
  }
  return "?";
}

void SweepSpec::check() const {
  if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
  if (methods.empty()) throw ConfigError("methods", "sweep needs at least one method");
  if (seeds.empty()) throw ConfigError("seeds", "sweep needs at least one seed");
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("values", "non-finite value");
    if (axis == SweepAxis::RisElements && (v < 1 || v != std::floor(v)))
      throw ConfigError("values", "element counts must be positive integers");
    if (axis == SweepAxis::AngleScan && !(v > 0)) throw ConfigError("values", "nonpositive resolution");
  }
}

namespace {

SweepAxis parse_axis(const std::string& s) {
  for (SweepAxis a : {SweepAxis::RisElements, SweepAxis::TransmitPowerDbm, SweepAxis::AngleScan})
    if (s == to_string(a)) return a;
  throw ConfigError("axis", "expected ris_elements, transmit_power_dbm or angle_scan");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json complex_list(const CVec& z) {
  json out = json::array();
  for (const auto& c : z) out.push_back(json::array({c.real(), c.imag()}));
  return out;
}

CVec complex_from(const json& j) {
  CVec z(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) z[static_cast<Eigen::Index>(i)] = {j[i].at(0).get<double>(), j[i].at(1).get<double>()};
  return z;
}

RunStatus parse_status(const std::string& s) {
  for (RunStatus r : {RunStatus::Optimal, RunStatus::IterationLimit, RunStatus::Infeasible, RunStatus::Failed})
    if (s == to_string(r)) return r;
  throw ConfigError("status", "unknown run status '" + s + "'");
}

}  // namespace

SweepSpec parse_sweep(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("sweep", std::string("malformed file: ") + e.what());
  }
  SweepSpec spec;
  try {
    spec.sweep_id = root.value("sweep_id", spec.sweep_id);
    if (root.contains("scenario")) {
      std::filesystem::path p = root["scenario"].get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      spec.scenario_path = p.lexically_normal().string();
    }
    if (root.contains("axis")) spec.axis = parse_axis(root["axis"].get<std::string>());
    spec.values = root.value("values", std::vector<double>{});
    for (const auto& m : root.value("methods", json::array())) spec.methods.push_back(parse_method(m.get<std::string>()));
    if (root.contains("seeds")) {
      const auto& s = root["seeds"];
      if (s.is_object()) {
        const auto first = s.value("first", std::uint64_t{1});
        const auto count = s.value("count", std::uint64_t{0});
        for (std::uint64_t i = 0; i < count; ++i) spec.seeds.push_back(first + i);
      } else {
        spec.seeds = s.get<std::vector<std::uint64_t>>();
      }
    }
    spec.output = root.value("output", spec.output);
  } catch (const json::exception& e) {
    throw ConfigError("sweep", std::string("bad field type: ") + e.what());
  }
  spec.check();
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("sweep", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep(ss.str(), std::filesystem::path(path).parent_path().string());
}

ScenarioFile apply_axis(const ScenarioFile& base, SweepAxis axis, double value) {
  ScenarioFile out = base;
  switch (axis) {
    case SweepAxis::RisElements:
      if (value < 1 || value != std::floor(value)) throw ConfigError("values", "element counts must be positive integers");
      out.sys.N_s = static_cast<int>(value);
      break;
    case SweepAxis::TransmitPowerDbm:
      out.sys.P_t = dbm_to_watts(value);
      break;
    case SweepAxis::AngleScan:
      break;
  }
  return out;
}

ResultRow make_row(const ScenarioFile& file, const Solution& solution, double axis_value, double runtime_ms) {
  ResultRow row;
  row.scenario_id = file.scenario_id;
  row.seed = solution.seed;
  row.method = solution.method;
  row.axis_value = axis_value;
  row.N_s = file.sys.N_s;
  row.M = file.sys.M;
  row.P_t_dbm = watts_to_dbm(file.sys.P_t);
  row.r_th = file.sys.rate_thresholds.empty()
                 ? 0.0
                 : *std::min_element(file.sys.rate_thresholds.begin(), file.sys.rate_thresholds.end());
  const bool done = solution.status == RunStatus::Optimal || solution.status == RunStatus::IterationLimit;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.mbpg_watts = done ? solution.mbpg : nan;
  row.mbpg_db = done ? watts_to_dbm(solution.mbpg) : nan;
  row.target_gains = done ? solution.target_gains : std::vector<double>(file.sys.target_angles.size(), nan);
  row.sum_rate = done ? solution.sum_rate : nan;
  row.ao_iterations = solution.ao_iterations();
  row.runtime_ms = runtime_ms;
  row.status = solution.status;
  return row;
}

std::vector<BeampatternSample> angle_scan(const Solution& solution, const ChannelSet& channels, double resolution_deg) {
  if (!(resolution_deg > 0) || !std::isfinite(resolution_deg)) throw ConfigError("resolution", "nonpositive resolution");
  const auto steps = static_cast<long>(std::floor(180.0 / resolution_deg + 1e-9));
  std::vector<BeampatternSample> out;
  for (long i = 0; i <= steps; ++i) {
    const double theta = deg_to_rad(-90.0 + static_cast<double>(i) * resolution_deg);
    out.push_back({theta, beampattern(theta, solution.w, solution.v, channels.H)});
  }
  if (out.back().angle < kPi / 2 - 1e-12) out.push_back({kPi / 2, beampattern(kPi / 2, solution.w, solution.v, channels.H)});
  return out;
}

std::vector<std::size_t> local_maxima(const std::vector<BeampatternSample>& s) {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(s[i].gain > s[i - 1].gain)) continue;
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1].gain == s[i].gain) ++j;
    if (j + 1 < s.size() && s[j + 1].gain < s[i].gain) peaks.push_back(i);
    i = j;
  }
  return peaks;
}

SweepResult run_sweep(const SweepSpec& spec, const ScenarioFile& base) {
  using Clock = std::chrono::steady_clock;
  spec.check();
  SweepResult result;
  for (double value : spec.values) {
    const ScenarioFile file = apply_axis(base, spec.axis, value);
    const Scenario scenario = validate(file.sys, file.alg);
    for (MethodKind method : spec.methods) {
      for (std::uint64_t seed : spec.seeds) {
        const auto t0 = Clock::now();
        const ChannelSet channels = generate(scenario, seed);
        const Solution sol = run(scenario, channels, method, seed);
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        result.rows.push_back(make_row(file, sol, value, ms));
        if (spec.axis == SweepAxis::AngleScan && !sol.w.empty()) {
          for (const auto& s : angle_scan(sol, channels, value))
            result.scans.push_back({file.scenario_id, seed, method, value, s});
        }
      }
    }
  }
  return result;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  const std::size_t targets = rows.empty() ? 0 : rows.front().target_gains.size();
  out << "scenario_id,seed,method,N_s,M,P_t_dbm,r_th,mbpg_watts,mbpg_db";
  for (std::size_t l = 0; l < targets; ++l) out << ",gain_target_" << l + 1;
  out << ",sum_rate,ao_iterations,runtime_ms,status\n";
  for (const auto& r : rows) {
    out << r.scenario_id << ',' << r.seed << ',' << to_string(r.method) << ',' << r.N_s << ',' << r.M << ','
        << fmt(r.P_t_dbm) << ',' << fmt(r.r_th) << ',' << fmt(r.mbpg_watts) << ',' << fmt(r.mbpg_db);
    for (std::size_t l = 0; l < targets; ++l)
      out << ',' << fmt(l < r.target_gains.size() ? r.target_gains[l] : std::numeric_limits<double>::quiet_NaN());
    out << ',' << fmt(r.sum_rate) << ',' << r.ao_iterations << ',' << fmt(r.runtime_ms) << ',' << to_string(r.status)
        << '\n';
  }
}

void write_scan_csv(const std::vector<ScanRow>& rows, std::ostream& out) {
  out << "scenario_id,seed,method,resolution_deg,angle_deg,gain_watts,gain_dbm\n";
  for (const auto& r : rows) {
    out << r.scenario_id << ',' << r.seed << ',' << to_string(r.method) << ',' << fmt(r.resolution_deg) << ','
        << fmt(rad_to_deg(r.sample.angle)) << ',' << fmt(r.sample.gain) << ',' << fmt(watts_to_dbm(r.sample.gain))
        << '\n';
  }
}

std::string sweep_metadata(const SweepSpec& spec, const ScenarioFile& base) {
  json j;
  j["code_version"] = version();
  j["sweep_id"] = spec.sweep_id;
  j["axis"] = to_string(spec.axis);
  j["values"] = spec.values;
  json methods = json::array();
  for (auto m : spec.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["seeds"] = spec.seeds;
  j["output"] = spec.output;
  j["scenario_path"] = spec.scenario_path;
  j["scenario"] = json::parse(dump_scenario(base));
  j["columns"] = {
      {"mbpg_watts", "minimum beampattern gain over the targets, watts"},
      {"mbpg_db", "the same in dBm"},
      {"gain_target_l", "beampattern at target l, watts"},
      {"sum_rate", "bits/s/Hz"},
      {"runtime_ms", "wall clock per row; excluded from reproducibility checks"},
  };
  return j.dump(2) + "\n";
}

std::string dump_solution(const ScenarioFile& scenario, const Solution& s) {
  json j;
  j["code_version"] = version();
  j["scenario"] = json::parse(dump_scenario(scenario));
  j["method"] = to_string(s.method);
  j["seed"] = s.seed;
  j["status"] = to_string(s.status);
  j["message"] = s.message;
  j["mbpg_watts"] = s.mbpg;
  j["initial_mbpg_watts"] = s.initial_mbpg;
  j["target_gains_watts"] = s.target_gains;
  j["rates"] = s.rates;
  j["sum_rate"] = s.sum_rate;
  j["power_watts"] = s.power;
  json w = json::array();
  for (const auto& wg : s.w) w.push_back(complex_list(wg));
  j["w"] = w;
  j["v"] = complex_list(s.v);
  j["decoding_order"] = s.noma.order;
  j["alpha"] = s.noma.alpha;
  json trace = json::array();
  for (const auto& r : s.trace) {
    trace.push_back({{"mbpg", r.mbpg},
                     {"sum_rate", r.sum_rate},
                     {"min_rate_margin", r.min_rate_margin},
                     {"power", r.power},
                     {"sca_iterations", r.sca_iterations},
                     {"penalty_iterations", r.penalty_iterations},
                     {"inner_iterations", r.inner_iterations},
                     {"modulus_gap", r.modulus_gap},
                     {"phase_kept_incoming", r.phase_kept_incoming},
                     {"phase_rebalanced", r.phase_rebalanced},
                     {"wall_ms", r.wall_ms}});
  }
  j["trace"] = trace;
  return j.dump(2) + "\n";
}

SavedSolution parse_solution(const std::string& text) {
  SavedSolution out;
  try {
    const json j = json::parse(text);
    out.scenario = parse_scenario(j.at("scenario").dump());
    Solution& s = out.solution;
    s.method = parse_method(j.at("method").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.status = parse_status(j.at("status").get<std::string>());
    s.message = j.value("message", std::string{});
    s.mbpg = j.value("mbpg_watts", 0.0);
    s.initial_mbpg = j.value("initial_mbpg_watts", 0.0);
    s.target_gains = j.value("target_gains_watts", std::vector<double>{});
    s.rates = j.value("rates", std::vector<double>{});
    s.sum_rate = j.value("sum_rate", 0.0);
    s.power = j.value("power_watts", 0.0);
    for (const auto& wg : j.at("w")) s.w.push_back(complex_from(wg));
    s.v = complex_from(j.at("v"));
    s.noma.order = j.value("decoding_order", std::vector<std::vector<int>>{});
    s.noma.alpha = j.value("alpha", std::vector<double>{});
    for (const auto& r : j.value("trace", json::array())) {
      IterationRecord rec;
      rec.mbpg = r.value("mbpg", 0.0);
      rec.sum_rate = r.value("sum_rate", 0.0);
      rec.min_rate_margin = r.value("min_rate_margin", 0.0);
      rec.power = r.value("power", 0.0);
      rec.sca_iterations = r.value("sca_iterations", 0);
      rec.penalty_iterations = r.value("penalty_iterations", 0);
      rec.inner_iterations = r.value("inner_iterations", 0);
      rec.modulus_gap = r.value("modulus_gap", 0.0);
      rec.phase_kept_incoming = r.value("phase_kept_incoming", false);
      rec.phase_rebalanced = r.value("phase_rebalanced", false);
      rec.wall_ms = r.value("wall_ms", 0.0);
      s.trace.push_back(rec);
    }
  } catch (const json::exception& e) {
    throw ConfigError("solution", std::string("malformed solution file: ") + e.what());
  }
  return out;
}

}  // namespace risnoma
