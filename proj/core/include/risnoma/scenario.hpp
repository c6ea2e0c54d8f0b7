#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risnoma/types.hpp"

namespace risnoma {

/// Physical scenario. All quantities are linear SI units (watts, meters,
/// radians); dB conversions happen only at the file boundary.
struct SystemConfig {
  int M = 4;    ///< BS antennas
  int N_s = 16; ///< RIS elements
  int G = 2;    ///< clusters
  std::vector<int> cluster_sizes{2, 2};
  Point2 bs_position{-20.0, 0.0};
  Point2 ris_position{0.0, 0.0};
  /// Users listed cluster by cluster, in the order given by cluster_sizes.
  std::vector<Point2> user_positions;
  std::vector<double> target_angles;  ///< radians, within [-pi/2, pi/2]
  double P_t = 1.0;                   ///< watts
  double noise_power = 1e-12;         ///< watts
  std::vector<double> rate_thresholds;  ///< bits/s/Hz, one per user
  double rician_factor = 2.0;           ///< linear
  double pathloss_ref = 1e-3;           ///< linear gain at 1 m
  double pathloss_exponent_bs_ris = 2.2;
  double pathloss_exponent_ris_user = 2.8;
  double element_spacing_ratio = 0.5;  ///< d / lambda
  std::uint64_t rng_seed = 1;
};

/// Which user channel enters the first-order expansion of the SINR
/// constraints in the phase subproblem.
enum class PhaseSinrChannel { PerUser, Strongest };

struct AlgorithmConfig {
  double eps_outer = 1e-3;
  double eps_sca = 1e-4;
  double eps_inner = 1e-4;
  int T_max = 30;
  int I1_max = 30;
  int I2_max = 20;
  int Im_max = 10;
  double mu0 = 1e-2;  ///< relative to the normalized beampattern level
  double mu_factor = 10.0;
  double mu_max = 1e2;
  double unit_modulus_tol = 1e-3;
  double solver_tol = 1e-8;
  int solver_max_iterations = 400;
  PhaseSinrChannel phase_sinr_channel = PhaseSinrChannel::PerUser;
};

/// Configuration that passed validation, with derived constants cached.
struct Scenario {
  SystemConfig sys;
  AlgorithmConfig alg;

  int K = 0;
  std::vector<int> cluster_offset;  ///< first flat user index of each cluster
  std::vector<double> gamma_th;     ///< 2^r - 1 per user
  double dist_bs_ris = 0.0;
  std::vector<double> dist_ris_user;

  int user_index(int g, int p) const { return cluster_offset[g] + p; }
};

/// SINR threshold matching a rate threshold in bits/s/Hz.
double sinr_threshold(double rate_bits);

/// Checks every invariant and computes the derived constants.
/// Throws ConfigError naming the offending field.
Scenario validate(const SystemConfig& sys, const AlgorithmConfig& alg);

/// Scenario files are JSON with comments allowed. Field names mirror
/// SystemConfig/AlgorithmConfig; powers, gains and angles carry a unit
/// suffix (`_dbm`, `_db`, `_deg`). See scenarios/README.md for the schema.
struct ScenarioFile {
  std::string scenario_id = "scenario";
  SystemConfig sys;
  AlgorithmConfig alg;
};

ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::string& path);
std::string dump_scenario(const ScenarioFile& file);

/// The desk-scale configuration used by the test suite (M=4, N_s=16,
/// two clusters of two users, targets at -30 and 60 degrees).
SystemConfig desk_scale_config();

/// The published five-user configuration (M=8, clusters of 3 and 2).
SystemConfig paper_scale_config();

}  // namespace risnoma
