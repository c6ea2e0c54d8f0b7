#include "risnoma/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "risnoma/errors.hpp"

namespace risnoma {

using nlohmann::json;

double sinr_threshold(double rate_bits) { return std::exp2(rate_bits) - 1.0; }

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

void validate_algorithm(const AlgorithmConfig& a) {
  require(a.eps_outer > 0, "eps_outer", "tolerance must be positive");
  require(a.eps_sca > 0, "eps_sca", "tolerance must be positive");
  require(a.eps_inner > 0, "eps_inner", "tolerance must be positive");
  require(a.unit_modulus_tol > 0, "unit_modulus_tol", "tolerance must be positive");
  require(a.solver_tol > 0, "solver_tol", "tolerance must be positive");
  require(a.T_max >= 1, "T_max", "iteration cap must be >= 1");
  require(a.I1_max >= 1, "I1_max", "iteration cap must be >= 1");
  require(a.I2_max >= 1, "I2_max", "iteration cap must be >= 1");
  require(a.Im_max >= 1, "Im_max", "iteration cap must be >= 1");
  require(a.solver_max_iterations >= 1, "solver_max_iterations", "iteration cap must be >= 1");
  require(a.mu0 > 0, "mu0", "penalty factor must be positive");
  require(a.mu_factor > 1, "mu_factor", "penalty growth factor must exceed 1");
  require(a.mu_max >= a.mu0, "mu_max", "must be >= mu0");
}

}  // namespace

Scenario validate(const SystemConfig& sys, const AlgorithmConfig& alg) {
  require(sys.M >= 1, "M", "antenna count must be >= 1");
  require(sys.N_s >= 1, "N_s", "element count must be >= 1");
  require(sys.G >= 1, "G", "cluster count must be >= 1");
  require(static_cast<int>(sys.cluster_sizes.size()) == sys.G, "cluster_sizes",
          "dimension mismatch: expected " + std::to_string(sys.G) + " entries");
  for (int size : sys.cluster_sizes) require(size >= 1, "cluster_sizes", "every cluster needs a user");
  const int K = std::accumulate(sys.cluster_sizes.begin(), sys.cluster_sizes.end(), 0);
  require(static_cast<int>(sys.user_positions.size()) == K, "user_positions",
          "dimension mismatch: cluster sizes sum to " + std::to_string(K));
  require(static_cast<int>(sys.rate_thresholds.size()) == K, "rate_thresholds",
          "dimension mismatch: expected " + std::to_string(K) + " entries");
  require(!sys.target_angles.empty(), "target_angles", "target set is empty");
  for (double theta : sys.target_angles) {
    require(std::isfinite(theta) && std::abs(theta) <= kPi / 2 + 1e-12, "target_angles",
            "angle out of range [-pi/2, pi/2]");
  }
  require(std::isfinite(sys.P_t) && sys.P_t > 0, "P_t", "nonpositive power");
  require(std::isfinite(sys.noise_power) && sys.noise_power > 0, "noise_power", "nonpositive power");
  require(sys.rician_factor >= 0, "rician_factor", "must be >= 0");
  require(std::isfinite(sys.pathloss_ref) && sys.pathloss_ref > 0, "pathloss_ref", "must be positive");
  require(sys.pathloss_exponent_bs_ris > 0, "pathloss_exponents.bs_ris", "must be positive");
  require(sys.pathloss_exponent_ris_user > 0, "pathloss_exponents.ris_user", "must be positive");
  require(sys.element_spacing_ratio == 0.5, "element_spacing_ratio", "only d/lambda = 0.5 is supported");
  for (double r : sys.rate_thresholds) {
    require(std::isfinite(r) && r >= 0, "rate_thresholds", "thresholds must be finite and >= 0");
  }
  validate_algorithm(alg);

  Scenario s;
  s.sys = sys;
  s.alg = alg;
  s.K = K;
  s.cluster_offset.resize(sys.G);
  for (int g = 0, off = 0; g < sys.G; ++g) {
    s.cluster_offset[g] = off;
    off += sys.cluster_sizes[g];
  }
  s.gamma_th.reserve(K);
  for (double r : sys.rate_thresholds) s.gamma_th.push_back(sinr_threshold(r));
  s.dist_bs_ris = distance(sys.bs_position, sys.ris_position);
  for (const auto& u : sys.user_positions) s.dist_ris_user.push_back(distance(sys.ris_position, u));
  return s;
}

// ---------------------------------------------------------------------------
// Files

namespace {

Point2 point_from(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(field, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json point_to(const Point2& p) { return json::array({p.x, p.y}); }

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

PhaseSinrChannel parse_channel_mode(const std::string& s) {
  if (s == "per_user") return PhaseSinrChannel::PerUser;
  if (s == "strongest") return PhaseSinrChannel::Strongest;
  throw ConfigError("phase_sinr_channel", "expected per_user or strongest");
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario", std::string("malformed file: ") + e.what());
  }

  ScenarioFile out;
  try {
    read_opt(root, "scenario_id", out.scenario_id);
    const json sys = root.value("system", json::object());
    SystemConfig& c = out.sys;
    read_opt(sys, "M", c.M);
    read_opt(sys, "N_s", c.N_s);
    read_opt(sys, "G", c.G);
    read_opt(sys, "cluster_sizes", c.cluster_sizes);
    if (sys.contains("bs_position")) c.bs_position = point_from(sys["bs_position"], "bs_position");
    if (sys.contains("ris_position")) c.ris_position = point_from(sys["ris_position"], "ris_position");
    if (sys.contains("user_positions")) {
      c.user_positions.clear();
      for (const auto& p : sys["user_positions"]) c.user_positions.push_back(point_from(p, "user_positions"));
    }
    if (sys.contains("target_angles_deg")) {
      c.target_angles.clear();
      for (double d : sys["target_angles_deg"]) c.target_angles.push_back(deg_to_rad(d));
    }
    if (sys.contains("P_t_dbm")) c.P_t = dbm_to_watts(sys["P_t_dbm"].get<double>());
    if (sys.contains("noise_power_dbm")) c.noise_power = dbm_to_watts(sys["noise_power_dbm"].get<double>());
    if (sys.contains("rate_thresholds")) {
      const auto& r = sys["rate_thresholds"];
      if (r.is_number()) {
        int K = std::accumulate(c.cluster_sizes.begin(), c.cluster_sizes.end(), 0);
        c.rate_thresholds.assign(static_cast<std::size_t>(std::max(K, 0)), r.get<double>());
      } else {
        c.rate_thresholds = r.get<std::vector<double>>();
      }
    }
    if (sys.contains("rician_factor_db")) c.rician_factor = db_to_linear(sys["rician_factor_db"].get<double>());
    if (sys.contains("pathloss_ref_db")) c.pathloss_ref = db_to_linear(sys["pathloss_ref_db"].get<double>());
    if (sys.contains("pathloss_exponents")) {
      const auto& pe = sys["pathloss_exponents"];
      read_opt(pe, "bs_ris", c.pathloss_exponent_bs_ris);
      read_opt(pe, "ris_user", c.pathloss_exponent_ris_user);
    }
    read_opt(sys, "element_spacing_ratio", c.element_spacing_ratio);
    read_opt(sys, "rng_seed", c.rng_seed);

    const json alg = root.value("algorithm", json::object());
    AlgorithmConfig& a = out.alg;
    read_opt(alg, "eps_outer", a.eps_outer);
    read_opt(alg, "eps_sca", a.eps_sca);
    read_opt(alg, "eps_inner", a.eps_inner);
    read_opt(alg, "T_max", a.T_max);
    read_opt(alg, "I1_max", a.I1_max);
    read_opt(alg, "I2_max", a.I2_max);
    read_opt(alg, "Im_max", a.Im_max);
    read_opt(alg, "mu0", a.mu0);
    read_opt(alg, "mu_factor", a.mu_factor);
    read_opt(alg, "mu_max", a.mu_max);
    read_opt(alg, "unit_modulus_tol", a.unit_modulus_tol);
    read_opt(alg, "solver_tol", a.solver_tol);
    read_opt(alg, "solver_max_iterations", a.solver_max_iterations);
    if (alg.contains("phase_sinr_channel")) a.phase_sinr_channel = parse_channel_mode(alg["phase_sinr_channel"]);
  } catch (const json::exception& e) {
    throw ConfigError("scenario", std::string("bad field type: ") + e.what());
  }
  return out;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const ScenarioFile& file) {
  const SystemConfig& c = file.sys;
  const AlgorithmConfig& a = file.alg;
  json sys;
  sys["M"] = c.M;
  sys["N_s"] = c.N_s;
  sys["G"] = c.G;
  sys["cluster_sizes"] = c.cluster_sizes;
  sys["bs_position"] = point_to(c.bs_position);
  sys["ris_position"] = point_to(c.ris_position);
  sys["user_positions"] = json::array();
  for (const auto& p : c.user_positions) sys["user_positions"].push_back(point_to(p));
  sys["target_angles_deg"] = json::array();
  for (double t : c.target_angles) sys["target_angles_deg"].push_back(rad_to_deg(t));
  sys["P_t_dbm"] = watts_to_dbm(c.P_t);
  sys["noise_power_dbm"] = watts_to_dbm(c.noise_power);
  sys["rate_thresholds"] = c.rate_thresholds;
  sys["rician_factor_db"] = 10.0 * std::log10(c.rician_factor);
  sys["pathloss_ref_db"] = 10.0 * std::log10(c.pathloss_ref);
  sys["pathloss_exponents"] = {{"bs_ris", c.pathloss_exponent_bs_ris},
                               {"ris_user", c.pathloss_exponent_ris_user}};
  sys["element_spacing_ratio"] = c.element_spacing_ratio;
  sys["rng_seed"] = c.rng_seed;

  json alg = {{"eps_outer", a.eps_outer},
              {"eps_sca", a.eps_sca},
              {"eps_inner", a.eps_inner},
              {"T_max", a.T_max},
              {"I1_max", a.I1_max},
              {"I2_max", a.I2_max},
              {"Im_max", a.Im_max},
              {"mu0", a.mu0},
              {"mu_factor", a.mu_factor},
              {"mu_max", a.mu_max},
              {"unit_modulus_tol", a.unit_modulus_tol},
              {"solver_tol", a.solver_tol},
              {"solver_max_iterations", a.solver_max_iterations},
              {"phase_sinr_channel",
               a.phase_sinr_channel == PhaseSinrChannel::PerUser ? "per_user" : "strongest"}};
  json root = {{"scenario_id", file.scenario_id}, {"system", sys}, {"algorithm", alg}};
  return root.dump(2);
}

SystemConfig desk_scale_config() {
  SystemConfig c;
  c.M = 4;
  c.N_s = 16;
  c.G = 2;
  c.cluster_sizes = {2, 2};
  c.bs_position = {-20.0, 0.0};
  c.ris_position = {0.0, 0.0};
  c.user_positions = {{-10.0, 9.0}, {-5.0, 5.0}, {14.0, 18.0}, {8.0, 8.0}};
  c.target_angles = {deg_to_rad(-30.0), deg_to_rad(60.0)};
  c.P_t = dbm_to_watts(30.0);
  c.noise_power = dbm_to_watts(-90.0);
  c.rate_thresholds.assign(4, 0.144);
  c.rician_factor = db_to_linear(3.0);
  c.pathloss_ref = db_to_linear(-30.0);
  return c;
}

SystemConfig paper_scale_config() {
  SystemConfig c = desk_scale_config();
  c.M = 8;
  c.N_s = 100;
  c.cluster_sizes = {3, 2};
  c.user_positions = {{-20.0, 25.0}, {-10.0, 9.0}, {-5.0, 5.0}, {14.0, 18.0}, {8.0, 8.0}};
  c.rate_thresholds.assign(5, 0.144);
  return c;
}

}  // namespace risnoma
