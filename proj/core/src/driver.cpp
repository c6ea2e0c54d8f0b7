#include "risnoma/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "risnoma/beamforming.hpp"
#include "risnoma/errors.hpp"
#include "risnoma/intra_cpa.hpp"
#include "risnoma/phase_opt.hpp"

namespace risnoma {

const char* to_string(MethodKind method) {
  switch (method) {
    case MethodKind::PAO: return "PAO";
    case MethodKind::NoSIC: return "NoSIC";
    case MethodKind::MRT: return "MRT";
    case MethodKind::RPS: return "RPS";
    case MethodKind::RadarOnly: return "RadarOnly";
  }
  return "?";
}

MethodKind parse_method(const std::string& name) {
  std::string key;
  for (char c : name)
    if (c != '_' && c != '-') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (MethodKind m : kAllMethods) {
    std::string ref;
    for (const char* c = to_string(m); *c; ++c) ref += static_cast<char>(std::tolower(static_cast<unsigned char>(*c)));
    if (key == ref) return m;
  }
  throw ConfigError("method", "unknown method '" + name + "'");
}

SinrModel sinr_model(MethodKind method) {
  switch (method) {
    case MethodKind::NoSIC: return SinrModel::NoSic;
    case MethodKind::RadarOnly: return SinrModel::Disabled;
    default: return SinrModel::Sic;
  }
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Optimal: return "Optimal";
    case RunStatus::IterationLimit: return "IterationLimit";
    case RunStatus::Infeasible: return "Infeasible";
    case RunStatus::Failed: return "Failed";
  }
  return "?";
}

CVec random_phases(int n, std::uint64_t seed) {
  std::mt19937_64 engine(seed ^ 0x5bd1e9955bd1e995ULL);
  CVec v(n);
  for (auto& z : v) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    z = std::polar(1.0, 2.0 * kPi * u);
  }
  return v;
}

namespace {

std::vector<CVec> cascaded_rows(const ChannelSet& ch, const CVec& v) {
  std::vector<CVec> rows;
  for (const auto& r : ch.user_rows) rows.push_back(cascaded(r, v, ch.H));
  return rows;
}

void summarize(Solution& sol, const Scenario& scenario, const ChannelSet& ch, SinrModel model) {
  const auto& targets = scenario.sys.target_angles;
  sol.target_gains = target_gains(sol.w, sol.v, ch.H, targets);
  sol.mbpg = *std::min_element(sol.target_gains.begin(), sol.target_gains.end());
  const auto gains = user_gains(scenario, cascaded_rows(ch, sol.v), sol.w);
  sol.rates = user_rates(scenario, gains, sol.noma, model);
  sol.sum_rate = 0.0;
  for (double r : sol.rates) sol.sum_rate += r;
  sol.power = 0.0;
  for (const auto& wg : sol.w) sol.power += wg.squaredNorm();
}

}  // namespace

namespace {

// Start shared by the communication methods: the no-SIC split is the most
// demanding one, so its feasible point serves every model.
std::vector<CVec> common_start(const Scenario& scenario, const ChannelSet& channels, const CVec& v, SinrModel model) {
  try {
    return beamforming::bootstrap(scenario, channels, v, SinrModel::NoSic).w;
  } catch (const ScenarioInfeasible&) {
    if (model == SinrModel::NoSic) throw;
  }
  try {
    return beamforming::bootstrap(scenario, channels, v, SinrModel::Sic).w;
  } catch (const ScenarioInfeasible&) {
    if (model != SinrModel::Disabled) throw;
  }
  return beamforming::bootstrap(scenario, channels, v, SinrModel::Disabled).w;
}

void run_from(Solution& sol, const Scenario& scenario, const ChannelSet& channels) {
  using Clock = std::chrono::steady_clock;
  const auto& alg = scenario.alg;
  const MethodKind method = sol.method;
  const SinrModel model = sinr_model(method);

  auto split = [&](const std::vector<CVec>& w, const CVec& v) {
    try {
      return allocate_network(scenario, user_gains(scenario, cascaded_rows(channels, v), w), model);
    } catch (const InfeasibleThresholds& e) {
      throw ScenarioInfeasible(std::string("power split failed: ") + e.what());
    }
  };

  sol.noma = split(sol.w, sol.v);
  sol.initial_mbpg = mbpg(sol.w, sol.v, channels.H, scenario.sys.target_angles);
  double previous = sol.initial_mbpg;
  bool converged = false;
  for (int k = 0; k < alg.T_max && !converged; ++k) {
    const auto t0 = Clock::now();
    IterationRecord rec;
    sol.noma = split(sol.w, sol.v);
    if (method != MethodKind::MRT) {
      beamforming::State state{sol.w, previous, 0};
      const auto problem = beamforming::make_problem(scenario, channels, sol.v, sol.noma, model);
      const auto bf = beamforming::optimize(state, problem, alg);
      sol.w = bf.w;
      rec.sca_iterations = bf.iterations;
    }
    if (method != MethodKind::RPS) {
      const auto st = phase::step(scenario, channels, sol.w, sol.v, sol.noma, model);
      sol.v = st.v;
      sol.noma = st.noma;
      rec.penalty_iterations = st.result.outer_iterations;
      for (int c : st.result.inner_iterations) rec.inner_iterations += c;
      rec.modulus_gap = st.result.modulus_gap;
      rec.phase_kept_incoming = st.kept_incoming;
      rec.phase_rebalanced = st.rebalanced;
    }
    summarize(sol, scenario, channels, model);
    rec.mbpg = sol.mbpg;
    rec.sum_rate = sol.sum_rate;
    rec.power = sol.power;
    rec.min_rate_margin = std::numeric_limits<double>::infinity();
    for (int u = 0; u < scenario.K; ++u)
      rec.min_rate_margin = std::min(rec.min_rate_margin, sol.rates[u] - scenario.sys.rate_thresholds[u]);
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    sol.trace.push_back(rec);
    converged = sol.mbpg - previous <= alg.eps_outer * previous;
    previous = sol.mbpg;
  }
  // Final split for the last phase update; the phase step already holds a
  // feasible one if this fails.
  try {
    sol.noma = split(sol.w, sol.v);
  } catch (const ScenarioInfeasible&) {
  }
  summarize(sol, scenario, channels, model);
  sol.status = converged ? RunStatus::Optimal : RunStatus::IterationLimit;
  if (!converged) sol.message = "T_max reached";
}

}  // namespace

Solution run(const Scenario& scenario, const ChannelSet& channels, MethodKind method, std::uint64_t seed) {
  const SinrModel model = sinr_model(method);
  const int G = scenario.sys.G;

  Solution sol;
  sol.method = method;
  sol.seed = seed;
  sol.v = random_phases(channels.N_s(), seed);
  try {
    if (method == MethodKind::MRT) {
      const auto rows = cascaded_rows(channels, sol.v);
      for (int g = 0; g < G; ++g) {
        int best = scenario.user_index(g, 0);
        for (int p = 1; p < scenario.sys.cluster_sizes[g]; ++p) {
          const int k = scenario.user_index(g, p);
          if (rows[k].norm() > rows[best].norm()) best = k;
        }
        sol.w.push_back(rows[best].conjugate() / rows[best].norm() * std::sqrt(scenario.sys.P_t / G));
      }
    } else if (method == MethodKind::RadarOnly) {
      // Warm start from the ISAC solution, a feasible point of the relaxed
      // problem; cold start when the ISAC run has nothing to offer.
      const Solution isac = run(scenario, channels, MethodKind::PAO, seed);
      if (isac.status == RunStatus::Optimal || isac.status == RunStatus::IterationLimit) {
        sol.w = isac.w;
        sol.v = isac.v;
      } else {
        sol.w = common_start(scenario, channels, sol.v, model);
      }
    } else {
      sol.w = common_start(scenario, channels, sol.v, model);
    }
    run_from(sol, scenario, channels);
  } catch (const ScenarioInfeasible& e) {
    sol.status = RunStatus::Infeasible;
    sol.message = e.what();
  } catch (const Error& e) {
    sol.status = RunStatus::Failed;
    sol.message = e.what();
  }
  return sol;
}

ComplexityReport complexity_report(const Solution& solution, const Scenario& scenario) {
  ComplexityReport r;
  r.T = solution.ao_iterations();
  r.beamforming_variables = 2 * scenario.sys.G * scenario.sys.M + 1;
  r.phase_variables = 2 * scenario.sys.N_s + 1;
  r.log_term = std::log2(1.0 / scenario.alg.solver_tol);
  const double bf = std::pow(r.beamforming_variables, 3.5);
  const double ph = std::pow(r.phase_variables, 3.5);
  for (const auto& rec : solution.trace) {
    r.I1.push_back(rec.sca_iterations);
    r.Im.push_back(rec.penalty_iterations);
    r.I2.push_back(rec.inner_iterations);
    r.cost += (rec.sca_iterations * bf + rec.inner_iterations * ph) * r.log_term;
  }
  return r;
}

std::string format(const ComplexityReport& r) {
  std::ostringstream out;
  auto list = [&](const std::vector<int>& xs) {
    out << '[';
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
    out << ']';
  };
  out << "T=" << r.T << " I1=";
  list(r.I1);
  out << " Im=";
  list(r.Im);
  out << " I2=";
  list(r.I2);
  out << "\nO(T(I1 (2GM+1)^3.5 + Im I2 (2N_s+1)^3.5) log2(1/eps)) with 2GM+1=" << r.beamforming_variables
      << ", 2N_s+1=" << r.phase_variables << ", log2(1/eps)=" << r.log_term << " -> " << r.cost << '\n';
  return out.str();
}

}  // namespace risnoma
