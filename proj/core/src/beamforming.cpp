#include "risnoma/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "risnoma/errors.hpp"
#include "risnoma/intra_cpa.hpp"

namespace risnoma::beamforming {

namespace {

int slot(int g, int M) { return 2 * M * g; }

std::vector<QuadraticTerm> beampattern_terms(const CVec& row, int G, int M) {
  std::vector<QuadraticTerm> terms;
  for (int g = 0; g < G; ++g) terms.push_back({row, slot(g, M)});
  return terms;
}

RVec with_level(const RVec& xw, double level) {
  RVec x(xw.size() + 1);
  x << xw, level;
  return x;
}

SocConstraint power_ball(int n) {
  SocConstraint c;
  c.F = RMat::Zero(n - 1, n);
  c.F.leftCols(n - 1).setIdentity();
  c.g = RVec::Zero(n - 1);
  c.p = RVec::Zero(n);
  c.q = 1.0;
  return c;
}

// Rate constraint in the scaled layout: rows normalised to unit length and
// floors expressed relative to P_t |row|^2.
void add_sinr(ConeProgram& prog, const Problem& problem, const RVec& x_prev) {
  for (const auto& req : problem.sinr) {
    const CVec& row = problem.user_rows[req.user];
    const double norm2 = row.squaredNorm();
    if (!(norm2 > 0.0)) throw SubproblemInfeasible("user channel vanishes");
    const CVec unit = row / std::sqrt(norm2);
    AffineForm rhs = quadratic_minorant({{unit, slot(req.cluster, problem.M)}}, x_prev);
    rhs.constant -= req.floor / (problem.power_budget * norm2);
    prog.add_soc(quadratic_to_soc(unit, req.kappa, rhs, slot(req.cluster, problem.M)));
  }
}

bool rates_hold(const Problem& problem, const std::vector<CVec>& w, double rel_tol) {
  for (const auto& req : problem.sinr) {
    const double gain = effective_gain(problem.user_rows[req.user], w[req.cluster]);
    if ((1.0 - req.kappa) * gain < req.floor * (1.0 - rel_tol)) return false;
  }
  return true;
}

double level(const Problem& problem, const std::vector<CVec>& w) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& b : problem.target_rows) {
    double total = 0.0;
    for (const auto& wg : w) total += effective_gain(b, wg);
    out = std::min(out, total);
  }
  return out;
}

}  // namespace

Problem make_problem(const Scenario& scenario, const ChannelSet& channels, const CVec& v, const NomaState& noma,
                     SinrModel model) {
  Problem p;
  p.G = scenario.sys.G;
  p.M = channels.M();
  p.power_budget = scenario.sys.P_t;
  for (double theta : scenario.sys.target_angles)
    p.target_rows.push_back(cascaded(steering_vector(theta, channels.N_s()).conjugate(), v, channels.H));
  for (const auto& r : channels.user_rows) p.user_rows.push_back(cascaded(r, v, channels.H));
  p.sinr = sinr_requirements(scenario, noma, model);
  return p;
}

RVec stack(const std::vector<CVec>& w, double scale) {
  if (w.empty()) return {};
  const auto M = w.front().size();
  RVec x(2 * M * static_cast<Eigen::Index>(w.size()));
  for (std::size_t g = 0; g < w.size(); ++g) {
    if (w[g].size() != M) throw DimensionError("beamformers must share one length");
    x.segment(2 * M * g, 2 * M) = complex_to_real(w[g]) * scale;
  }
  return x;
}

std::vector<CVec> unstack(const RVec& x, int G, int M, double scale) {
  if (x.size() < 2 * G * M) throw DimensionError("unstack: vector too short");
  std::vector<CVec> w;
  for (int g = 0; g < G; ++g) w.push_back(real_to_complex(x.segment(slot(g, M), 2 * M)) * scale);
  return w;
}

AffineForm linearize_beampattern(const std::vector<CVec>& w_prev, const CVec& b_row) {
  const int G = static_cast<int>(w_prev.size());
  const int M = G ? static_cast<int>(w_prev.front().size()) : 0;
  if (b_row.size() != M) throw DimensionError("linearize_beampattern: row length must equal M");
  return quadratic_minorant(beampattern_terms(b_row, G, M), stack(w_prev, 1.0));
}

SocConstraint linearize_sinr(const std::vector<CVec>& w_prev, const CVec& user_row, const SinrRequirement& req) {
  const int G = static_cast<int>(w_prev.size());
  if (req.cluster < 0 || req.cluster >= G) throw DimensionError("linearize_sinr: cluster out of range");
  const int M = static_cast<int>(w_prev.front().size());
  if (user_row.size() != M) throw DimensionError("linearize_sinr: row length must equal M");
  AffineForm rhs = quadratic_minorant({{user_row, slot(req.cluster, M)}}, stack(w_prev, 1.0));
  rhs.constant -= req.floor;
  return quadratic_to_soc(user_row, req.kappa, rhs, slot(req.cluster, M));
}

NomaState bootstrap_split(const Scenario& scenario, const std::vector<std::vector<int>>& order, SinrModel model) {
  NomaState noma{order, std::vector<double>(scenario.K, 0.0)};
  for (int g = 0; g < scenario.sys.G; ++g) {
    const auto& ord = order[g];
    const auto P = ord.size();
    auto gamma = [&](std::size_t pos) { return scenario.gamma_th[scenario.user_index(g, ord[pos])]; };
    auto set = [&](std::size_t pos, double a) { noma.alpha[scenario.user_index(g, ord[pos])] = a; };
    if (model == SinrModel::Disabled) {
      for (std::size_t pos = 0; pos < P; ++pos) set(pos, pos + 1 == P ? 1.0 : 0.0);
    } else if (model == SinrModel::Sic) {
      double rest = 1.0;
      for (std::size_t pos = 0; pos + 1 < P; ++pos) {
        const double next = rest / (1.0 + 2.0 * gamma(pos));
        set(pos, rest - next);
        rest = next;
      }
      set(P - 1, rest);
    } else {
      // gamma (1 - a) / a = 1 / c for every member, then spread the slack.
      double need = 0.0;
      for (std::size_t pos = 0; pos < P; ++pos) need += gamma(pos) / (1.0 + gamma(pos));
      if (need >= 1.0) throw ScenarioInfeasible("rate targets exceed the interference-limited capacity");
      double c = 2.0;
      auto total = [&](double cc) {
        double s = 0.0;
        for (std::size_t pos = 0; pos < P; ++pos) s += cc * gamma(pos) / (1.0 + cc * gamma(pos));
        return s;
      };
      while (total(c) >= 1.0) c = 1.0 + 0.5 * (c - 1.0);
      const double sum = total(c);
      for (std::size_t pos = 0; pos < P; ++pos) set(pos, c * gamma(pos) / (1.0 + c * gamma(pos)) / sum);
    }
  }
  return noma;
}

Bootstrap bootstrap(const Scenario& scenario, const ChannelSet& channels, const CVec& v, SinrModel model) {
  const auto& alg = scenario.alg;
  const int G = scenario.sys.G;
  const int M = channels.M();
  std::vector<CVec> rows;
  for (const auto& r : channels.user_rows) rows.push_back(cascaded(r, v, channels.H));

  // Matched start: each cluster points at the sum of its normalised conjugate rows.
  std::vector<CVec> w(G, CVec::Zero(M));
  for (int g = 0; g < G; ++g)
    for (int p = 0; p < scenario.sys.cluster_sizes[g]; ++p) {
      const CVec& r = rows[scenario.user_index(g, p)];
      const double n = r.norm();
      if (n > 0.0) w[g] += r.conjugate() / n;
    }
  for (auto& wg : w) {
    if (wg.norm() == 0.0) wg = CVec::Ones(M);
    wg /= wg.norm();
  }

  std::vector<std::vector<int>> order(G);
  for (int g = 0; g < G; ++g) {
    std::vector<double> gains;
    for (int p = 0; p < scenario.sys.cluster_sizes[g]; ++p)
      gains.push_back(effective_gain(rows[scenario.user_index(g, p)], w[g]));
    order[g] = decoding_order(gains);
  }

  Bootstrap out;
  out.noma = bootstrap_split(scenario, order, model);
  Problem problem = make_problem(scenario, channels, v, out.noma, model);

  // Scale each cluster until every constraint holds with a factor-two margin.
  for (const auto& req : problem.sinr) {
    const double gain = effective_gain(problem.user_rows[req.user], w[req.cluster]);
    if (!(gain > 0.0)) throw ScenarioInfeasible("a user is unreachable from the start beamformer");
    const double need = 2.0 * req.floor / ((1.0 - req.kappa) * gain);
    const double current = w[req.cluster].squaredNorm();
    if (need > current) w[req.cluster] *= std::sqrt(need / current);
  }

  const int n = 2 * G * M + 1;
  const double scale = 1.0 / std::sqrt(scenario.sys.P_t);
  double power = 0.0;
  for (const auto& wg : w) power += wg.squaredNorm();
  for (int it = 0; it < alg.I1_max && !problem.sinr.empty(); ++it) {
    const RVec x_prev = with_level(stack(w, scale), 0.0);
    ConeProgram prog(n);
    prog.objective[n - 1] = -1.0;
    SocConstraint ball = power_ball(n);
    ball.p[n - 1] = 1.0;
    ball.q = 0.0;
    prog.add_soc(std::move(ball));
    add_sinr(prog, problem, x_prev);
    const ConeSolution sol = solve(prog, {alg.solver_tol, alg.solver_max_iterations});
    ++out.iterations;
    if (sol.status != ConeStatus::Optimal) break;
    std::vector<CVec> next = unstack(sol.x, G, M, 1.0 / scale);
    if (!rates_hold(problem, next, 1e-9)) break;
    double next_power = 0.0;
    for (const auto& wg : next) next_power += wg.squaredNorm();
    const bool done = power - next_power <= alg.eps_sca * power;
    if (next_power < power) {
      w = std::move(next);
      power = next_power;
    }
    if (done) break;
  }
  out.min_power = power;
  const double up = std::sqrt(scenario.sys.P_t / power);
  for (auto& wg : w) wg *= up;
  if (power > scenario.sys.P_t) {
    // The conservative split may be the culprit; the closed-form split at
    // full power is the last chance.
    try {
      out.noma = allocate_network(scenario, user_gains(scenario, rows, w), model);
    } catch (const InfeasibleThresholds&) {
      throw ScenarioInfeasible("minimum power for the rate targets exceeds the budget");
    }
  }
  if (power <= scenario.sys.P_t && !problem.sinr.empty()) {
    // The minimum-power point serves the weak users with no room to spare;
    // a first ascent under the conservative split moves it inside.
    State state{w, 0.0, 0};
    w = optimize(state, problem, alg).w;
  }
  out.w = std::move(w);
  return out;
}

Result optimize(State& state, const Problem& problem, const AlgorithmConfig& alg) {
  const int G = problem.G;
  const int M = problem.M;
  const int n = problem.variable_count();
  if (static_cast<int>(state.w.size()) != G) throw DimensionError("beamforming: one beamformer per cluster");
  if (problem.target_rows.empty()) throw DimensionError("beamforming: no target angles");
  const double scale = 1.0 / std::sqrt(problem.power_budget);
  double bmax = 0.0;
  for (const auto& b : problem.target_rows) bmax = std::max(bmax, b.squaredNorm());

  Result res;
  res.w = state.w;
  res.mbpg = level(problem, res.w);
  for (int it = 0; it < alg.I1_max; ++it) {
    // Levels are measured relative to the current one so the solver sees O(1) data.
    const double unit = std::max(res.mbpg, 1e-12 * bmax * problem.power_budget);
    const double row_scale = std::sqrt(problem.power_budget / unit);
    const RVec x_prev = with_level(stack(res.w, scale), 0.0);
    ConeProgram prog(n);
    prog.objective[n - 1] = 1.0;
    for (const auto& b : problem.target_rows) {
      const AffineForm f = quadratic_minorant(beampattern_terms(b * row_scale, G, M), x_prev);
      RVec a = -f.coeffs;
      a[n - 1] += 1.0;
      prog.add_ineq(std::move(a), f.constant);
    }
    prog.add_soc(power_ball(n));
    add_sinr(prog, problem, x_prev);
    const ConeSolution sol = solve(prog, {alg.solver_tol, alg.solver_max_iterations});
    ++res.iterations;
    ++state.iteration;
    if (sol.status == ConeStatus::Infeasible) throw SubproblemInfeasible("beamforming subproblem infeasible");
    if (sol.status != ConeStatus::Optimal) break;
    std::vector<CVec> next = unstack(sol.x, G, M, 1.0 / scale);
    if (!rates_hold(problem, next, 1e-9)) break;
    const double t_next = level(problem, next);
    res.t_trace.push_back(t_next);
    const double before = res.mbpg;
    if (t_next >= before) {
      res.w = std::move(next);
      res.mbpg = t_next;
    }
    if (t_next - before <= alg.eps_sca * before) break;
  }
  state.w = res.w;
  state.t = res.mbpg;
  return res;
}

Certificate convergence_certificate(const std::vector<CVec>& w_star, const Problem& problem, int samples,
                                    std::uint64_t seed) {
  const int G = problem.G;
  const int M = problem.M;
  const double scale = 1.0 / std::sqrt(problem.power_budget);
  const RVec x0 = stack(w_star, scale);
  const auto n = x0.size();

  // Each term set is normalised so its value at the expansion point is O(1).
  std::vector<std::vector<QuadraticTerm>> sets;
  for (const auto& b : problem.target_rows) sets.push_back(beampattern_terms(b, G, M));
  for (const auto& req : problem.sinr) sets.push_back({{problem.user_rows[req.user], slot(req.cluster, M)}});
  for (auto& terms : sets) {
    const double at = quadratic_value(terms, x0);
    const double norm = at > 0.0 ? 1.0 / std::sqrt(at) : 1.0;
    for (auto& t : terms) t.row *= norm;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Certificate cert;
  for (const auto& terms : sets) {
    const AffineForm hat = quadratic_minorant(terms, x0);
    // F = -sum |.|^2, F^ = -minorant.
    const double f0 = quadratic_value(terms, x0);
    cert.tangency = std::max(cert.tangency, std::abs(f0 - hat(x0)) / std::max(1.0, f0));
    for (int s = 0; s < samples; ++s) {
      RVec x(n);
      for (auto& e : x) e = normal(rng);
      x = x0 + x / std::sqrt(static_cast<double>(n));
      cert.minorant = std::max(cert.minorant, hat(x) - quadratic_value(terms, x));
    }
    const double h = 1e-6;
    RVec grad_f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      RVec xp = x0, xm = x0;
      xp[i] += h;
      xm[i] -= h;
      grad_f[i] = (quadratic_value(terms, xp) - quadratic_value(terms, xm)) / (2.0 * h);
    }
    const double denom = std::max(hat.coeffs.norm(), 1e-12);
    cert.gradient = std::max(cert.gradient, (grad_f - hat.coeffs).norm() / denom);
  }
  return cert;
}

}  // namespace risnoma::beamforming
