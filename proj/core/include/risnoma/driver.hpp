#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risnoma/channel.hpp"
#include "risnoma/metrics.hpp"
#include "risnoma/scenario.hpp"

namespace risnoma {

enum class MethodKind { PAO, NoSIC, MRT, RPS, RadarOnly };

inline constexpr MethodKind kAllMethods[] = {MethodKind::PAO, MethodKind::NoSIC, MethodKind::MRT, MethodKind::RPS,
                                             MethodKind::RadarOnly};

const char* to_string(MethodKind method);
/// Case-insensitive; accepts "radar_only" for RadarOnly. Throws ConfigError.
MethodKind parse_method(const std::string& name);
SinrModel sinr_model(MethodKind method);

enum class RunStatus {
  Optimal,         ///< relative improvement fell below eps_outer
  IterationLimit,  ///< T_max reached
  Infeasible,      ///< rate targets unreachable
  Failed,          ///< a subproblem broke down
};

const char* to_string(RunStatus status);

struct IterationRecord {
  double mbpg = 0.0;             ///< watts
  double sum_rate = 0.0;         ///< bits/s/Hz
  double min_rate_margin = 0.0;  ///< min_k (rate_k - r_k), bits/s/Hz
  double power = 0.0;            ///< watts
  int sca_iterations = 0;
  int penalty_iterations = 0;
  int inner_iterations = 0;      ///< phase solves over all penalty levels
  double modulus_gap = 0.0;      ///< before projection
  bool phase_kept_incoming = false;
  bool phase_rebalanced = false;
  double wall_ms = 0.0;
};

struct Solution {
  MethodKind method = MethodKind::PAO;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Failed;
  std::string message;

  std::vector<CVec> w;
  CVec v;
  NomaState noma;
  double initial_mbpg = 0.0;
  double mbpg = 0.0;
  std::vector<double> target_gains;
  std::vector<double> rates;
  double sum_rate = 0.0;
  double power = 0.0;
  std::vector<IterationRecord> trace;

  int ao_iterations() const { return static_cast<int>(trace.size()); }
};

/// Runs one method on one channel realization. Never throws for
/// infeasible or failed runs; the status and message say what happened and
/// the trace holds the iterations completed so far.
Solution run(const Scenario& scenario, const ChannelSet& channels, MethodKind method, std::uint64_t seed);

/// Uniform random phases, deterministic in `seed`.
CVec random_phases(int n, std::uint64_t seed);

struct ComplexityReport {
  int T = 0;
  std::vector<int> I1;  ///< SCA solves per AO iteration
  std::vector<int> Im;  ///< penalty levels per AO iteration
  std::vector<int> I2;  ///< phase solves per AO iteration
  int beamforming_variables = 0;  ///< 2 G M + 1
  int phase_variables = 0;        ///< 2 N_s + 1
  double log_term = 0.0;          ///< log2(1 / solver_tol)
  double cost = 0.0;              ///< realized operation-count estimate
};

ComplexityReport complexity_report(const Solution& solution, const Scenario& scenario);
std::string format(const ComplexityReport& report);

}  // namespace risnoma
