#include <cmath>

#include "doctest.h"
#include "risnoma/driver.hpp"
#include "risnoma/errors.hpp"
#include "risnoma/intra_cpa.hpp"

using namespace risnoma;

namespace {

Scenario desk() { return validate(desk_scale_config(), AlgorithmConfig{}); }

double power(const std::vector<CVec>& w) {
  double p = 0.0;
  for (const auto& wg : w) p += wg.squaredNorm();
  return p;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(parse_method("PAO") == MethodKind::PAO);
  CHECK(parse_method("nosic") == MethodKind::NoSIC);
  CHECK(parse_method("radar_only") == MethodKind::RadarOnly);
  CHECK(parse_method("Radar-Only") == MethodKind::RadarOnly);
  for (MethodKind m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("sdr"), ConfigError);
  CHECK(sinr_model(MethodKind::NoSIC) == SinrModel::NoSic);
  CHECK(sinr_model(MethodKind::RadarOnly) == SinrModel::Disabled);
  CHECK(sinr_model(MethodKind::MRT) == SinrModel::Sic);
}

TEST_CASE("random phases are unit modulus and seeded") {
  const CVec a = random_phases(32, 9), b = random_phases(32, 9), c = random_phases(32, 10);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& z : a) CHECK(std::abs(std::abs(z) - 1.0) < 1e-15);
}

TEST_CASE("PAO runs converge monotonically within the budget") {
  const Scenario s = desk();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ChannelSet ch = generate(s, seed);
    const Solution sol = run(s, ch, MethodKind::PAO, seed);
    REQUIRE(sol.status == RunStatus::Optimal);
    CHECK(sol.ao_iterations() <= s.alg.T_max);
    double prev = sol.initial_mbpg;
    for (const auto& rec : sol.trace) {
      CHECK(rec.mbpg >= prev * (1.0 - s.alg.solver_tol));
      prev = rec.mbpg;
    }
    CHECK(sol.mbpg == doctest::Approx(mbpg(sol.w, sol.v, ch.H, s.sys.target_angles)).epsilon(1e-12));
    CHECK(power(sol.w) <= s.sys.P_t * (1.0 + 1e-8));
    for (const auto& z : sol.v) CHECK(std::abs(std::abs(z) - 1.0) <= 1e-14);
    for (int k = 0; k < s.K; ++k) CHECK(sol.rates[k] >= s.sys.rate_thresholds[k] - 1e-6);
    for (int g = 0; g < s.sys.G; ++g) {
      double total = 0.0;
      for (int p = 0; p < s.sys.cluster_sizes[g]; ++p) total += sol.noma.alpha[s.user_index(g, p)];
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      std::vector<double> gains;
      for (int p = 0; p < s.sys.cluster_sizes[g]; ++p)
        gains.push_back(effective_gain(cascaded(ch.user_rows[s.user_index(g, p)], sol.v, ch.H), sol.w[g]));
      CHECK(sol.noma.order[g] == decoding_order(gains));
    }
  }
}

TEST_CASE("runs are deterministic") {
  const Scenario s = desk();
  const ChannelSet ch = generate(s, 6);
  const Solution a = run(s, ch, MethodKind::PAO, 6);
  const Solution b = run(s, ch, MethodKind::PAO, 6);
  CHECK(a.mbpg == b.mbpg);
  CHECK(a.v == b.v);
  for (std::size_t g = 0; g < a.w.size(); ++g) CHECK(a.w[g] == b.w[g]);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].mbpg == b.trace[i].mbpg);
}

TEST_CASE("baselines keep their frozen blocks") {
  const Scenario s = desk();
  const std::uint64_t seed = 2;
  const ChannelSet ch = generate(s, seed);

  const Solution rps = run(s, ch, MethodKind::RPS, seed);
  REQUIRE(rps.status == RunStatus::Optimal);
  CHECK(rps.v == random_phases(16, seed));
  for (const auto& rec : rps.trace) CHECK(rec.inner_iterations == 0);

  const Solution mrt = run(s, ch, MethodKind::MRT, seed);
  REQUIRE(mrt.status == RunStatus::Optimal);
  const CVec v0 = random_phases(16, seed);
  for (int g = 0; g < s.sys.G; ++g) {
    CHECK(mrt.w[g].squaredNorm() == doctest::Approx(s.sys.P_t / s.sys.G).epsilon(1e-12));
    // Aligned with the stronger cascaded row of its cluster at the start phases.
    const CVec r0 = cascaded(ch.user_rows[s.user_index(g, 0)], v0, ch.H);
    const CVec r1 = cascaded(ch.user_rows[s.user_index(g, 1)], v0, ch.H);
    const CVec& best = r0.norm() >= r1.norm() ? r0 : r1;
    CHECK(std::abs(best.dot(mrt.w[g].conjugate())) ==
          doctest::Approx(best.norm() * mrt.w[g].norm()).epsilon(1e-12));
  }
  for (const auto& rec : mrt.trace) CHECK(rec.sca_iterations == 0);
}

TEST_CASE("radar-only dominates the ISAC design on the same realization") {
  const Scenario s = desk();
  for (std::uint64_t seed : {1u, 7u}) {
    const ChannelSet ch = generate(s, seed);
    const Solution pao = run(s, ch, MethodKind::PAO, seed);
    const Solution radar = run(s, ch, MethodKind::RadarOnly, seed);
    REQUIRE(radar.status == RunStatus::Optimal);
    CHECK(radar.mbpg >= pao.mbpg);
  }
}

TEST_CASE("unreachable targets end as Infeasible with a message") {
  SystemConfig sys = desk_scale_config();
  sys.rate_thresholds.assign(4, 40.0);
  const Scenario s = validate(sys, AlgorithmConfig{});
  const ChannelSet ch = generate(s, 1);
  for (MethodKind m : {MethodKind::PAO, MethodKind::NoSIC, MethodKind::MRT, MethodKind::RPS}) {
    const Solution sol = run(s, ch, m, 1);
    CHECK(sol.status == RunStatus::Infeasible);
    CHECK_FALSE(sol.message.empty());
  }
  CHECK(run(s, ch, MethodKind::RadarOnly, 1).status == RunStatus::Optimal);
}

TEST_CASE("an iteration cap of one reports IterationLimit when progress remains") {
  AlgorithmConfig alg;
  alg.T_max = 1;
  const Scenario s = validate(desk_scale_config(), alg);
  const ChannelSet ch = generate(s, 3);
  const Solution sol = run(s, ch, MethodKind::PAO, 3);
  CHECK(sol.ao_iterations() == 1);
  CHECK(sol.status == RunStatus::IterationLimit);
}

TEST_CASE("complexity report") {
  const Scenario s = desk();
  const ChannelSet ch = generate(s, 4);
  const Solution sol = run(s, ch, MethodKind::PAO, 4);
  const auto r = complexity_report(sol, s);
  CHECK(r.T == sol.ao_iterations());
  CHECK(r.I1.size() == sol.trace.size());
  CHECK(r.Im.size() == sol.trace.size());
  CHECK(r.I2.size() == sol.trace.size());
  for (std::size_t i = 0; i < sol.trace.size(); ++i) {
    CHECK(r.I1[i] == sol.trace[i].sca_iterations);
    CHECK(r.I2[i] == sol.trace[i].inner_iterations);
  }
  CHECK(r.phase_variables == 33);
  CHECK(r.beamforming_variables == 17);
  CHECK(r.log_term == doctest::Approx(std::log2(1e8)));
  CHECK(r.cost > 0.0);
  CHECK(format(r).find("T=") == 0);

  const Scenario full = validate(paper_scale_config(), AlgorithmConfig{});
  CHECK(complexity_report(Solution{}, full).beamforming_variables == 33);
}
