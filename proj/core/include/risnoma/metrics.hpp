#pragma once

#include <span>
#include <vector>

#include "risnoma/scenario.hpp"
#include "risnoma/types.hpp"

namespace risnoma {

/// Gains below this are treated as exact zeros.
inline constexpr double kGainFloor = 1e-30;

struct BeampatternSample {
  double angle = 0.0;  ///< radians
  double gain = 0.0;   ///< watts
};

/// SIC SINR of user p (0-based) in a cluster whose users are listed in
/// decoding order: users after p are interference, users before p are
/// cancelled.
double sinr(double gain, std::span<const double> alpha, int p, double noise);

/// SINR of user p when nothing is cancelled (every other user interferes).
double sinr_no_sic(double gain, std::span<const double> alpha, int p, double noise);

/// log2(1 + sinr).
double rate(double sinr_value);

/// Sum of beamformer covariances, sum_g w_g w_g^H.
CMat covariance(std::span<const CVec> beamformers);

/// Transmit beampattern a^H Phi H (sum_g w_g w_g^H) H^H Phi^H a in watts.
double beampattern(double theta, std::span<const CVec> beamformers, const CVec& v, const CMat& H);

/// Phase-domain form: beampattern(theta) = v^H Q(theta) v.
CMat q_matrix(double theta, std::span<const CVec> beamformers, const CMat& H);

/// How the communication constraints treat intra-cluster interference.
enum class SinrModel {
  Sic,       ///< users after p in decoding order interfere
  NoSic,     ///< every other cluster member interferes
  Disabled,  ///< no rate constraints (radar only)
};

/// Decoding order and power split of every cluster.
struct NomaState {
  /// order[g][k] is the in-cluster index of the user decoded k-th
  /// (ascending effective gain).
  std::vector<std::vector<int>> order;
  std::vector<double> alpha;  ///< per flat user index
};

/// Rate constraint of one user written as
/// |row^T w|^2 >= kappa |row^T w|^2 + floor, where kappa = gamma * I / alpha,
/// floor = gamma * noise / alpha and I is the interfering power fraction.
struct SinrRequirement {
  int user = 0;
  int cluster = 0;
  double kappa = 0.0;
  double floor = 0.0;  ///< watts
};

/// One requirement per user; empty for SinrModel::Disabled.
/// Throws Error when a constrained user has a zero power coefficient.
std::vector<SinrRequirement> sinr_requirements(const Scenario& scenario, const NomaState& noma, SinrModel model);

/// Effective gains |h~_k^T w_{g(k)}|^2 per flat user.
std::vector<double> user_gains(const Scenario& scenario, const std::vector<CVec>& cascaded_rows,
                               std::span<const CVec> beamformers);

/// Per-user rates in bits/s/Hz. Disabled evaluates with SIC.
std::vector<double> user_rates(const Scenario& scenario, std::span<const double> gains, const NomaState& noma,
                               SinrModel model);

/// Minimum beampattern over the target set.
double mbpg(std::span<const CVec> beamformers, const CVec& v, const CMat& H, std::span<const double> targets);

/// Beampattern at each target angle.
std::vector<double> target_gains(std::span<const CVec> beamformers, const CVec& v, const CMat& H,
                                 std::span<const double> targets);

}  // namespace risnoma
