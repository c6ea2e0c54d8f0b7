#include "risnoma/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "risnoma/channel.hpp"
#include "risnoma/errors.hpp"

namespace risnoma {

namespace {

double floor_gain(double g) { return g < kGainFloor ? 0.0 : g; }

void check_user(std::span<const double> alpha, int p) {
  if (alpha.empty()) throw DimensionError("sinr: empty cluster");
  if (p < 0 || p >= static_cast<int>(alpha.size())) throw DimensionError("sinr: user index out of range");
}

void check_beamformers(std::span<const CVec> beamformers, const CMat& H) {
  for (const auto& w : beamformers) {
    if (w.size() != H.cols()) throw DimensionError("beamformer length must equal BS antenna count");
  }
}

}  // namespace

double sinr(double gain, std::span<const double> alpha, int p, double noise) {
  check_user(alpha, p);
  gain = floor_gain(gain);
  double interference = 0.0;
  for (std::size_t j = p + 1; j < alpha.size(); ++j) interference += alpha[j];
  return gain * alpha[p] / (gain * interference + noise);
}

double sinr_no_sic(double gain, std::span<const double> alpha, int p, double noise) {
  check_user(alpha, p);
  gain = floor_gain(gain);
  double interference = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    if (static_cast<int>(j) != p) interference += alpha[j];
  return gain * alpha[p] / (gain * interference + noise);
}

double rate(double sinr_value) { return std::log2(1.0 + sinr_value); }

CMat covariance(std::span<const CVec> beamformers) {
  if (beamformers.empty()) return {};
  const auto M = beamformers.front().size();
  CMat R = CMat::Zero(M, M);
  for (const auto& w : beamformers) R.noalias() += w * w.adjoint();
  return R;
}

double beampattern(double theta, std::span<const CVec> beamformers, const CVec& v, const CMat& H) {
  check_beamformers(beamformers, H);
  if (v.size() != H.rows()) throw DimensionError("beampattern: phase vector length must equal RIS size");
  // b^T = a^H Phi H, then sum_g |b^T w_g|^2.
  const CVec b = cascaded(steering_vector(theta, static_cast<int>(H.rows())).conjugate(), v, H);
  double total = 0.0;
  for (const auto& w : beamformers) total += effective_gain(b, w);
  return floor_gain(total);
}

CMat q_matrix(double theta, std::span<const CVec> beamformers, const CMat& H) {
  check_beamformers(beamformers, H);
  const CVec a = steering_vector(theta, static_cast<int>(H.rows()));
  // diag(a^H) H R H^H diag(a)
  const CMat A = a.conjugate().asDiagonal() * H;
  CMat Q = CMat::Zero(H.rows(), H.rows());
  for (const auto& w : beamformers) {
    const CVec c = A * w;
    Q.noalias() += c * c.adjoint();
  }
  return Q;
}

std::vector<double> target_gains(std::span<const CVec> beamformers, const CVec& v, const CMat& H,
                                 std::span<const double> targets) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (double theta : targets) out.push_back(beampattern(theta, beamformers, v, H));
  return out;
}

double mbpg(std::span<const CVec> beamformers, const CVec& v, const CMat& H, std::span<const double> targets) {
  if (targets.empty()) throw DimensionError("mbpg: empty target set");
  const auto gains = target_gains(beamformers, v, H, targets);
  return *std::min_element(gains.begin(), gains.end());
}

std::vector<SinrRequirement> sinr_requirements(const Scenario& scenario, const NomaState& noma, SinrModel model) {
  std::vector<SinrRequirement> out;
  if (model == SinrModel::Disabled) return out;
  const auto& sys = scenario.sys;
  if (static_cast<int>(noma.alpha.size()) != scenario.K || static_cast<int>(noma.order.size()) != sys.G)
    throw DimensionError("sinr_requirements: NOMA state does not match the scenario");
  for (int g = 0; g < sys.G; ++g) {
    const auto& order = noma.order[g];
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const int k = scenario.user_index(g, order[pos]);
      const double a = noma.alpha[k];
      if (!(a > 0.0)) throw Error("sinr_requirements: zero power coefficient for a constrained user");
      double interference = 0.0;
      for (std::size_t j = 0; j < order.size(); ++j) {
        const bool interferes = model == SinrModel::Sic ? j > pos : j != pos;
        if (interferes) interference += noma.alpha[scenario.user_index(g, order[j])];
      }
      const double gamma = scenario.gamma_th[k];
      out.push_back({k, g, gamma * interference / a, gamma * sys.noise_power / a});
    }
  }
  return out;
}

std::vector<double> user_gains(const Scenario& scenario, const std::vector<CVec>& cascaded_rows,
                               std::span<const CVec> beamformers) {
  if (static_cast<int>(cascaded_rows.size()) != scenario.K) throw DimensionError("user_gains: one row per user");
  if (static_cast<int>(beamformers.size()) != scenario.sys.G)
    throw DimensionError("user_gains: one beamformer per cluster");
  std::vector<double> gains(scenario.K);
  for (int g = 0; g < scenario.sys.G; ++g)
    for (int p = 0; p < scenario.sys.cluster_sizes[g]; ++p) {
      const int k = scenario.user_index(g, p);
      gains[k] = effective_gain(cascaded_rows[k], beamformers[g]);
    }
  return gains;
}

std::vector<double> user_rates(const Scenario& scenario, std::span<const double> gains, const NomaState& noma,
                               SinrModel model) {
  std::vector<double> rates(scenario.K, 0.0);
  for (int g = 0; g < scenario.sys.G; ++g) {
    const auto& order = noma.order[g];
    std::vector<double> alpha(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) alpha[pos] = noma.alpha[scenario.user_index(g, order[pos])];
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const int k = scenario.user_index(g, order[pos]);
      const int p = static_cast<int>(pos);
      const double s = model == SinrModel::NoSic ? sinr_no_sic(gains[k], alpha, p, scenario.sys.noise_power)
                                                 : sinr(gains[k], alpha, p, scenario.sys.noise_power);
      rates[k] = rate(s);
    }
  }
  return rates;
}

}  // namespace risnoma
