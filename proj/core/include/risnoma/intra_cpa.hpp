#pragma once

#include <span>
#include <vector>

#include "risnoma/metrics.hpp"
#include "risnoma/scenario.hpp"

namespace risnoma {

/// One cluster, users listed in decoding order (ascending effective gain).
struct ClusterAllocationInput {
  std::vector<double> effective_gains;   ///< |h~^H w_g|^2, watts, ascending
  std::vector<double> gamma_thresholds;  ///< SINR thresholds 2^r - 1
  double noise = 0.0;                    ///< watts
};

/// Closed-form SIC allocation: weak users get exactly their threshold
/// power, the strongest user takes the remainder.
/// Throws InfeasibleThresholds if the remainder cannot serve the strongest
/// user, DimensionError/Error on malformed input.
std::vector<double> allocate(const ClusterAllocationInput& input);

/// Allocation when the cluster decodes without SIC (full interference).
std::vector<double> no_sic_allocate(const ClusterAllocationInput& input);

/// Cluster sum rate with SIC, bits/s/Hz.
double cluster_sum_rate(std::span<const double> alpha, std::span<const double> gains, double noise);

/// Cluster sum rate without SIC, bits/s/Hz.
double cluster_sum_rate_no_sic(std::span<const double> alpha, std::span<const double> gains, double noise);

/// d(sum rate)/d(alpha[p0]) when alpha[p0 + 1] absorbs the change and every
/// other coefficient is held fixed. p0 is 0-based, 0 <= p0 <= P - 2.
double sum_rate_derivative(std::span<const double> alpha, std::span<const double> gains, double noise, int p0);

/// Stable ascending sort of effective gains: entry k is the index of the
/// user decoded k-th. Equal gains keep their original order.
std::vector<int> decoding_order(std::span<const double> gains);

/// Decoding order and closed-form split of every cluster for the given
/// per-user effective gains. SinrModel::Disabled gives the whole cluster
/// budget to the strongest user. Throws InfeasibleThresholds.
NomaState allocate_network(const Scenario& scenario, std::span<const double> gains, SinrModel model);

}  // namespace risnoma
