#include "risnoma/phase_opt.hpp"

#include <algorithm>
#include <cmath>

#include "risnoma/errors.hpp"
#include "risnoma/intra_cpa.hpp"

namespace risnoma::phase {

namespace {

SocConstraint modulus_bound(int n, int element) {
  SocConstraint c;
  c.F = RMat::Zero(2, n);
  c.F(0, 2 * element) = 1.0;
  c.F(1, 2 * element + 1) = 1.0;
  c.g = RVec::Zero(2);
  c.p = RVec::Zero(n);
  c.q = 1.0;
  return c;
}

double modulus_gap(const CVec& v) {
  double gap = 0.0;
  for (const auto& z : v) gap = std::max(gap, std::abs(1.0 - std::abs(z)));
  return gap;
}

CVec project(const CVec& v) {
  CVec out(v.size());
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    const double m = std::abs(v[n]);
    out[n] = m > 0.0 ? v[n] / m : Complex(1.0, 0.0);
  }
  return out;
}

double level(const Problem& problem, const CVec& v) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& rows : problem.target_rows) {
    double total = 0.0;
    for (const auto& r : rows) total += effective_gain(r, v);
    out = std::min(out, total);
  }
  return out;
}

bool rates_hold(const Problem& problem, const CVec& v, double rel_tol) {
  for (const auto& req : problem.sinr) {
    const double gain = effective_gain(problem.user_rows[req.user], v);
    if ((1.0 - req.kappa) * gain < req.floor * (1.0 - rel_tol)) return false;
  }
  return true;
}

}  // namespace

Problem make_problem(const Scenario& scenario, const ChannelSet& channels, const std::vector<CVec>& w,
                     const NomaState& noma, SinrModel model) {
  const int G = scenario.sys.G;
  if (static_cast<int>(w.size()) != G) throw DimensionError("phase: one beamformer per cluster");
  Problem p;
  p.N_s = channels.N_s();
  std::vector<CVec> hw;
  for (const auto& wg : w) {
    if (wg.size() != channels.M()) throw DimensionError("phase: beamformer length must equal M");
    hw.push_back((channels.H * wg).conjugate());
  }
  for (double theta : scenario.sys.target_angles) {
    const CVec a = steering_vector(theta, p.N_s);
    std::vector<CVec> rows;
    for (const auto& c : hw) rows.push_back(a.cwiseProduct(c));
    p.target_rows.push_back(std::move(rows));
  }
  p.user_rows.resize(scenario.K);
  for (int g = 0; g < G; ++g)
    for (int q = 0; q < scenario.sys.cluster_sizes[g]; ++q) {
      int source = q;
      if (scenario.alg.phase_sinr_channel == PhaseSinrChannel::Strongest && !noma.order.empty())
        source = noma.order[g].back();
      const CVec& r = channels.user_rows[scenario.user_index(g, source)];
      p.user_rows[scenario.user_index(g, q)] = r.conjugate().cwiseProduct(hw[g]);
    }
  p.sinr = sinr_requirements(scenario, noma, model);
  return p;
}

AffineForm linearize_quadratic_v(const CVec& v_prev, const CMat& Q) {
  if (Q.rows() != Q.cols() || Q.rows() != v_prev.size()) throw DimensionError("linearize_quadratic_v: size mismatch");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw Error("linearize_quadratic_v: Q is not Hermitian");
  const CVec u = Q * v_prev;
  const auto n = static_cast<int>(2 * v_prev.size());
  return {2.0 * inner_product_real(u, 0, n), -std::real(v_prev.dot(u))};
}

SocConstraint sinr_constraint_v(const CVec& v_prev, const CVec& user_row, const SinrRequirement& req) {
  if (user_row.size() != v_prev.size()) throw DimensionError("sinr_constraint_v: size mismatch");
  AffineForm rhs = quadratic_minorant({{user_row, 0}}, complex_to_real(v_prev));
  rhs.constant -= req.floor;
  return quadratic_to_soc(user_row, req.kappa, rhs, 0);
}

double penalized_objective(const CVec& v, const CVec& v_prev, double t, double mu) {
  if (v.size() != v_prev.size()) throw DimensionError("penalized_objective: size mismatch");
  return t + 2.0 * mu * std::real(v_prev.dot(v - v_prev));
}

Result optimize(State& state, const Problem& problem, const AlgorithmConfig& alg) {
  const int N = problem.N_s;
  const int n = problem.variable_count();
  if (state.v.size() != N) throw DimensionError("phase: v length must equal N_s");
  if (problem.target_rows.empty()) throw DimensionError("phase: no target angles");

  Result res;
  CVec v = state.v;
  const double start = level(problem, v);
  // Levels in units of the incoming one; rate rows scaled to unit best case.
  const double unit = start > 0.0 ? start : 1.0;
  const double row_scale = 1.0 / std::sqrt(unit);
  std::vector<CVec> unit_user_rows(problem.user_rows.size());
  std::vector<double> unit_floor(problem.user_rows.size(), 0.0);
  for (const auto& req : problem.sinr) {
    const double l1 = problem.user_rows[req.user].cwiseAbs().sum();
    if (!(l1 > 0.0)) throw SubproblemInfeasible("user channel vanishes");
    unit_user_rows[req.user] = problem.user_rows[req.user] / l1;
    unit_floor[req.user] = req.floor / (l1 * l1);
  }

  double mu = alg.mu0;
  state.mu = mu;
  for (int m = 0; m < alg.Im_max; ++m) {
    ++res.outer_iterations;
    ++state.outer;
    double value = level(problem, v) / unit + mu * (v.squaredNorm() - N);
    int inner = 0;
    for (int i = 0; i < alg.I2_max; ++i) {
      const RVec x_prev = [&] {
        RVec x(n);
        x << complex_to_real(v), 0.0;
        return x;
      }();
      ConeProgram prog(n);
      prog.objective = 2.0 * mu * inner_product_real(v, 0, n);
      prog.objective[n - 1] = 1.0;
      for (const auto& rows : problem.target_rows) {
        std::vector<QuadraticTerm> terms;
        for (const auto& r : rows) terms.push_back({r * row_scale, 0});
        const AffineForm f = quadratic_minorant(terms, x_prev);
        RVec a = -f.coeffs;
        a[n - 1] += 1.0;
        prog.add_ineq(std::move(a), f.constant);
      }
      for (const auto& req : problem.sinr) {
        AffineForm rhs = quadratic_minorant({{unit_user_rows[req.user], 0}}, x_prev);
        rhs.constant -= unit_floor[req.user];
        prog.add_soc(quadratic_to_soc(unit_user_rows[req.user], req.kappa, rhs, 0));
      }
      for (int e = 0; e < N; ++e) prog.add_soc(modulus_bound(n, e));
      const ConeSolution sol = solve(prog, {alg.solver_tol, alg.solver_max_iterations});
      ++inner;
      ++state.inner;
      if (sol.status == ConeStatus::Infeasible) throw SubproblemInfeasible("phase subproblem infeasible");
      if (sol.status != ConeStatus::Optimal) break;
      const CVec next = real_to_complex(sol.x.head(2 * N));
      if (!rates_hold(problem, next, 1e-9)) break;
      const double next_value = level(problem, next) / unit + mu * (next.squaredNorm() - N);
      res.objective_trace.push_back(next_value);
      const double before = value;
      if (next_value >= before) {
        v = next;
        value = next_value;
      }
      if (next_value - before <= alg.eps_inner * std::max(1.0, std::abs(before))) break;
    }
    res.inner_iterations.push_back(inner);
    if (modulus_gap(v) <= alg.unit_modulus_tol) break;
    if (mu * alg.mu_factor > alg.mu_max * (1.0 + 1e-12)) break;
    mu *= alg.mu_factor;
    state.mu = mu;
  }

  res.v_relaxed = v;
  res.modulus_gap = modulus_gap(v);
  res.v = project(v);
  res.mbpg = level(problem, res.v);
  state.v = res.v;
  state.t = res.mbpg;
  return res;
}

Step step(const Scenario& scenario, const ChannelSet& channels, const std::vector<CVec>& w, const CVec& v,
          const NomaState& noma, SinrModel model) {
  const Problem problem = make_problem(scenario, channels, w, noma, model);
  State state{v, scenario.alg.mu0, 0.0, 0, 0};
  Step out;
  out.result = optimize(state, problem, scenario.alg);
  out.v = v;
  out.noma = noma;
  const double incoming = mbpg(w, v, channels.H, scenario.sys.target_angles);
  out.mbpg = incoming;

  auto rates_ok = [&](const CVec& cand, const NomaState& split) {
    if (model == SinrModel::Disabled) return true;
    std::vector<CVec> rows;
    for (const auto& r : channels.user_rows) rows.push_back(cascaded(r, cand, channels.H));
    const auto rates = user_rates(scenario, user_gains(scenario, rows, w), split, model);
    for (int k = 0; k < scenario.K; ++k)
      if (rates[k] < scenario.sys.rate_thresholds[k] - 1e-6) return false;
    return true;
  };

  const CVec& cand = out.result.v;
  const double level_cand = mbpg(w, cand, channels.H, scenario.sys.target_angles);
  if (level_cand < incoming * (1.0 - scenario.alg.solver_tol)) {
    out.kept_incoming = true;
    return out;
  }
  if (rates_ok(cand, noma)) {
    out.v = cand;
    out.mbpg = level_cand;
    return out;
  }
  try {
    std::vector<CVec> rows;
    for (const auto& r : channels.user_rows) rows.push_back(cascaded(r, cand, channels.H));
    NomaState split = allocate_network(scenario, user_gains(scenario, rows, w), model);
    if (rates_ok(cand, split)) {
      out.v = cand;
      out.noma = std::move(split);
      out.mbpg = level_cand;
      out.rebalanced = true;
      return out;
    }
  } catch (const InfeasibleThresholds&) {
  }
  out.kept_incoming = true;
  return out;
}

}  // namespace risnoma::phase
