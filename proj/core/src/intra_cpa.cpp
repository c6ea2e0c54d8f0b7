#include "risnoma/intra_cpa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "risnoma/errors.hpp"
#include "risnoma/metrics.hpp"

namespace risnoma {

namespace {

void check_input(const ClusterAllocationInput& in) {
  const auto& g = in.effective_gains;
  if (g.empty()) throw DimensionError("allocate: empty cluster");
  if (in.gamma_thresholds.size() != g.size()) throw DimensionError("allocate: one threshold per user required");
  if (!(in.noise > 0)) throw Error("allocate: noise power must be positive");
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!(g[p] > 0) || !std::isfinite(g[p])) throw Error("allocate: effective gains must be positive and finite");
    if (p > 0 && g[p] < g[p - 1]) throw Error("allocate: effective gains must be ascending (decoding order)");
    if (!(in.gamma_thresholds[p] >= 0)) throw Error("allocate: thresholds must be >= 0");
  }
}

// Relative slack when comparing a realized SINR against its threshold.
constexpr double kThresholdSlack = 1e-12;

}  // namespace

std::vector<double> allocate(const ClusterAllocationInput& in) {
  check_input(in);
  const auto P = in.effective_gains.size();
  std::vector<double> alpha(P, 0.0);
  double assigned = 0.0;
  for (std::size_t p = 0; p + 1 < P; ++p) {
    const double gamma = in.gamma_thresholds[p];
    alpha[p] = gamma / (1.0 + gamma) * (1.0 - assigned + in.noise / in.effective_gains[p]);
    assigned += alpha[p];
  }
  alpha[P - 1] = 1.0 - assigned;
  if (!(alpha[P - 1] > 0.0)) {
    throw InfeasibleThresholds("allocate: weak users consume the whole cluster budget");
  }
  const double strong = sinr(in.effective_gains[P - 1], alpha, static_cast<int>(P - 1), in.noise);
  if (strong < in.gamma_thresholds[P - 1] * (1.0 - kThresholdSlack)) {
    throw InfeasibleThresholds("allocate: strongest user misses its rate threshold");
  }
  return alpha;
}

std::vector<double> no_sic_allocate(const ClusterAllocationInput& in) {
  check_input(in);
  const auto P = in.effective_gains.size();
  std::vector<double> alpha(P, 0.0);
  double assigned = 0.0;
  for (std::size_t p = 0; p + 1 < P; ++p) {
    const double gamma = in.gamma_thresholds[p];
    alpha[p] = gamma * (1.0 + in.noise / in.effective_gains[p]) / (1.0 + gamma);
    assigned += alpha[p];
  }
  alpha[P - 1] = 1.0 - assigned;
  if (!(alpha[P - 1] > 0.0)) {
    throw InfeasibleThresholds("no_sic_allocate: weak users consume the whole cluster budget");
  }
  const double strong = sinr_no_sic(in.effective_gains[P - 1], alpha, static_cast<int>(P - 1), in.noise);
  if (strong < in.gamma_thresholds[P - 1] * (1.0 - kThresholdSlack)) {
    throw InfeasibleThresholds("no_sic_allocate: strongest user misses its rate threshold");
  }
  return alpha;
}

double cluster_sum_rate(std::span<const double> alpha, std::span<const double> gains, double noise) {
  if (alpha.size() != gains.size()) throw DimensionError("cluster_sum_rate: size mismatch");
  double total = 0.0;
  for (std::size_t p = 0; p < alpha.size(); ++p) total += rate(sinr(gains[p], alpha, static_cast<int>(p), noise));
  return total;
}

double cluster_sum_rate_no_sic(std::span<const double> alpha, std::span<const double> gains, double noise) {
  if (alpha.size() != gains.size()) throw DimensionError("cluster_sum_rate_no_sic: size mismatch");
  double total = 0.0;
  for (std::size_t p = 0; p < alpha.size(); ++p)
    total += rate(sinr_no_sic(gains[p], alpha, static_cast<int>(p), noise));
  return total;
}

double sum_rate_derivative(std::span<const double> alpha, std::span<const double> gains, double noise, int p0) {
  if (alpha.size() != gains.size()) throw DimensionError("sum_rate_derivative: size mismatch");
  if (p0 < 0 || p0 + 1 >= static_cast<int>(alpha.size())) {
    throw DimensionError("sum_rate_derivative: index out of range");
  }
  // Interference seen by user p0: everything decoded after it.
  double tail = 0.0;
  for (std::size_t j = p0 + 1; j < alpha.size(); ++j) tail += alpha[j];
  const double g0 = gains[p0];
  const double g1 = gains[p0 + 1];
  const double d0 = g0 * tail + noise;
  const double d1 = g1 * tail + noise;
  return noise * (g0 - g1) / (d0 * d1) / std::numbers::ln2;
}

std::vector<int> decoding_order(std::span<const double> gains) {
  std::vector<int> idx(gains.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return gains[a] < gains[b]; });
  return idx;
}

NomaState allocate_network(const Scenario& scenario, std::span<const double> gains, SinrModel model) {
  if (static_cast<int>(gains.size()) != scenario.K) throw DimensionError("allocate_network: one gain per user");
  NomaState noma;
  noma.alpha.assign(scenario.K, 0.0);
  for (int g = 0; g < scenario.sys.G; ++g) {
    const int P = scenario.sys.cluster_sizes[g];
    const auto first = gains.begin() + scenario.cluster_offset[g];
    const std::vector<double> cluster(first, first + P);
    std::vector<int> order = decoding_order(cluster);
    ClusterAllocationInput in;
    in.noise = scenario.sys.noise_power;
    for (int k : order) {
      in.effective_gains.push_back(cluster[k]);
      in.gamma_thresholds.push_back(scenario.gamma_th[scenario.user_index(g, k)]);
    }
    std::vector<double> alpha(P, 0.0);
    if (model == SinrModel::Disabled) {
      alpha[P - 1] = 1.0;
    } else {
      alpha = model == SinrModel::Sic ? allocate(in) : no_sic_allocate(in);
    }
    for (int pos = 0; pos < P; ++pos) noma.alpha[scenario.user_index(g, order[pos])] = alpha[pos];
    noma.order.push_back(std::move(order));
  }
  return noma;
}

}  // namespace risnoma
