#pragma once

#include <cstdint>
#include <vector>

#include "risnoma/channel.hpp"
#include "risnoma/cone.hpp"
#include "risnoma/metrics.hpp"
#include "risnoma/scenario.hpp"

namespace risnoma::beamforming {

/// Everything the SCA subproblem needs once v and the power split are fixed.
/// The cone program works on w / sqrt(P_t) stacked cluster after cluster
/// (2 G M real slots) followed by one beampattern level.
struct Problem {
  int G = 0;
  int M = 0;
  double power_budget = 0.0;  ///< watts
  std::vector<CVec> target_rows;   ///< b_l^T = a(theta_l)^H Phi H
  std::vector<CVec> user_rows;     ///< cascaded user rows, flat index
  std::vector<SinrRequirement> sinr;

  int variable_count() const { return 2 * G * M + 1; }
};

Problem make_problem(const Scenario& scenario, const ChannelSet& channels, const CVec& v, const NomaState& noma,
                     SinrModel model);

struct State {
  std::vector<CVec> w;  ///< expansion point, watts^(1/2)
  double t = 0.0;       ///< beampattern level at w, watts
  int iteration = 0;
};

struct Result {
  std::vector<CVec> w;
  double mbpg = 0.0;
  std::vector<double> t_trace;  ///< level after each SCA solve, watts
  int iterations = 0;
};

/// w stacked into the realified layout (without the level slot).
RVec stack(const std::vector<CVec>& w, double scale);
std::vector<CVec> unstack(const RVec& x, int G, int M, double scale);

/// Tangent minorant of sum_g |b^T w_g|^2 at w_prev, over the stacked
/// unscaled beamformers.
AffineForm linearize_beampattern(const std::vector<CVec>& w_prev, const CVec& b_row);

/// Convexified rate constraint of one user at w_prev: the affine minorant
/// of |h~^T w_g|^2 must exceed kappa |h~^T w_g|^2 + floor. Unscaled layout.
SocConstraint linearize_sinr(const std::vector<CVec>& w_prev, const CVec& user_row, const SinrRequirement& req);

/// Lowest total power reaching the rate targets, found by iterated
/// power minimisation from a scaled matched start.
struct Bootstrap {
  std::vector<CVec> w;  ///< rescaled to the full budget
  NomaState noma;       ///< the split the start was built for
  double min_power = 0.0;
  int iterations = 0;
};

/// Conservative split for a given decoding order: every non-final user
/// gets kappa = 1/2.
NomaState bootstrap_split(const Scenario& scenario, const std::vector<std::vector<int>>& order, SinrModel model);

/// Throws ScenarioInfeasible when the minimum power exceeds the budget.
Bootstrap bootstrap(const Scenario& scenario, const ChannelSet& channels, const CVec& v, SinrModel model);

/// SCA ascent on the beampattern level. The incoming state must satisfy the
/// rate and power constraints.
Result optimize(State& state, const Problem& problem, const AlgorithmConfig& alg);

struct Certificate {
  double tangency = 0.0;  ///< max |F - F^| at the expansion point, relative
  double minorant = 0.0;  ///< max (F - F^) over samples, should be <= 0
  double gradient = 0.0;  ///< max relative gradient mismatch
};

/// Checks the surrogate properties of every beampattern and rate term at
/// w_star. F is the negated concave-side function, F^ its convex upper
/// surrogate, compared on `samples` random points.
Certificate convergence_certificate(const std::vector<CVec>& w_star, const Problem& problem, int samples,
                                    std::uint64_t seed);

}  // namespace risnoma::beamforming
