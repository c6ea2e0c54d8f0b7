#pragma once

#include <vector>

#include "risnoma/channel.hpp"
#include "risnoma/cone.hpp"
#include "risnoma/metrics.hpp"
#include "risnoma/scenario.hpp"

namespace risnoma::phase {

/// Phase subproblem data for fixed beamformers. Every row acts on v
/// directly: the beampattern at target l is sum_g |target_rows[l][g]^T v|^2
/// and user k sees |user_rows[k]^T v|^2. Cone variables are v realified
/// (2 N_s slots) followed by one level.
struct Problem {
  int N_s = 0;
  std::vector<std::vector<CVec>> target_rows;
  std::vector<CVec> user_rows;
  std::vector<SinrRequirement> sinr;

  int variable_count() const { return 2 * N_s + 1; }
};

Problem make_problem(const Scenario& scenario, const ChannelSet& channels, const std::vector<CVec>& w,
                     const NomaState& noma, SinrModel model);

struct State {
  CVec v;
  double mu = 0.0;
  double t = 0.0;  ///< beampattern level at v, watts
  int inner = 0;
  int outer = 0;
};

struct Result {
  CVec v;                ///< unit modulus
  CVec v_relaxed;        ///< last iterate before projection
  double modulus_gap = 0.0;     ///< max |1 - |v_n|| before projection
  double mbpg = 0.0;            ///< at v, watts
  int outer_iterations = 0;
  std::vector<int> inner_iterations;  ///< per penalty level
  std::vector<double> objective_trace;  ///< penalized objective, normalized
};

/// 2 Re{v_prev^H Q v} - v_prev^H Q v_prev over the realified v.
/// Throws Error when Q is not Hermitian.
AffineForm linearize_quadratic_v(const CVec& v_prev, const CMat& Q);

/// Convexified rate constraint in v for one user at v_prev.
SocConstraint sinr_constraint_v(const CVec& v_prev, const CVec& user_row, const SinrRequirement& req);

/// t + 2 mu sum_n Re{conj(v_prev_n) (v_n - v_prev_n)}.
double penalized_objective(const CVec& v, const CVec& v_prev, double t, double mu);

/// Penalty continuation around SCA ascent, then projection to unit modulus.
/// The incoming v must satisfy the rate constraints.
Result optimize(State& state, const Problem& problem, const AlgorithmConfig& alg);

/// One AO phase step: optimize, re-check the original rates on the
/// projected v, re-split power if needed, and fall back to the incoming v
/// when neither restores feasibility or the level regressed.
struct Step {
  Result result;
  CVec v;
  NomaState noma;
  double mbpg = 0.0;
  bool rebalanced = false;
  bool kept_incoming = false;
};

Step step(const Scenario& scenario, const ChannelSet& channels, const std::vector<CVec>& w, const CVec& v,
          const NomaState& noma, SinrModel model);

}  // namespace risnoma::phase
