#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "oracles.hpp"
#include "risnoma/channel.hpp"
#include "risnoma/errors.hpp"
#include "risnoma/metrics.hpp"

using namespace risnoma;

namespace {

CVec random_cvec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  CVec z(n);
  for (int i = 0; i < n; ++i) z[i] = {N(rng), N(rng)};
  return z;
}

CMat random_cmat(std::mt19937_64& rng, int r, int c) {
  CMat A(r, c);
  for (int j = 0; j < c; ++j) A.col(j) = random_cvec(rng, r);
  return A;
}

CVec unit_phases(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0.0, 2.0 * kPi);
  CVec v(n);
  for (auto& z : v) z = std::polar(1.0, U(rng));
  return v;
}

}  // namespace

TEST_CASE("sinr and rate") {
  const double noise = 1e-12;
  const std::vector<double> one{1.0};
  CHECK(sinr(noise, one, 0, noise) == doctest::Approx(1.0));
  CHECK(rate(sinr(noise, one, 0, noise)) == doctest::Approx(1.0));

  const std::vector<double> alpha{0.75, 0.25};
  CHECK(sinr(2 * noise, alpha, 0, noise) == doctest::Approx(1.0));
  CHECK(sinr(2 * noise, alpha, 1, noise) == doctest::Approx(0.5));
  CHECK(sinr_no_sic(2 * noise, alpha, 1, noise) == doctest::Approx(0.5 / 2.5));

  const std::vector<double> zero{0.0, 1.0};
  CHECK(sinr(5.0, zero, 0, noise) == 0.0);

  CHECK(rate(0.0) == 0.0);
  CHECK(rate(1.0) == doctest::Approx(1.0));
  CHECK(rate(3.0) == doctest::Approx(2.0));
}

TEST_CASE("rate is monotone in own power and antitone in later users' power") {
  const double noise = 1e-3, g = 0.7;
  std::vector<double> base{0.2, 0.3, 0.5};
  const double r0 = rate(sinr(g, base, 0, noise));
  auto more_own = base;
  more_own[0] += 0.1;
  CHECK(rate(sinr(g, more_own, 0, noise)) > r0);
  auto more_later = base;
  more_later[2] += 0.1;
  CHECK(rate(sinr(g, more_later, 0, noise)) < r0);
  auto more_earlier = base;
  more_earlier[0] += 0.1;
  CHECK(rate(sinr(g, more_earlier, 1, noise)) == rate(sinr(g, base, 1, noise)));
}

TEST_CASE("beampattern agrees with explicit sums and with the phase-domain form") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int N = 2 + trial % 10, M = 1 + trial % 4, G = 1 + trial % 3;
    const CMat H = random_cmat(rng, N, M);
    std::vector<CVec> w;
    for (int g = 0; g < G; ++g) w.push_back(random_cvec(rng, M));
    const CVec v = unit_phases(rng, N);
    const double theta = std::uniform_real_distribution<double>(-kPi / 2, kPi / 2)(rng);

    const double direct = testing::beampattern_direct(theta, w, v, H);
    const double bp = beampattern(theta, w, v, H);
    CHECK(bp == doctest::Approx(direct).epsilon(1e-10));

    const CMat Q = q_matrix(theta, w, H);
    CHECK((Q - Q.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()));
    CHECK(std::real(v.dot(Q * v)) == doctest::Approx(direct).epsilon(1e-10));

    Eigen::SelfAdjointEigenSolver<CMat> eig(Q);
    const auto& ev = eig.eigenvalues();
    CHECK(ev.minCoeff() >= -1e-10 * std::max(1.0, ev.maxCoeff()));
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) rank += ev[i] > 1e-9 * ev.maxCoeff();
    CHECK(rank <= G);

    // |c|^2 scaling and per-beam phase invariance.
    std::vector<CVec> scaled, rotated;
    for (int g = 0; g < G; ++g) {
      scaled.push_back(w[g] * Complex(0.0, 3.0));
      rotated.push_back(w[g] * std::polar(1.0, 0.7 * g + 0.3));
    }
    CHECK(beampattern(theta, scaled, v, H) == doctest::Approx(9.0 * bp).epsilon(1e-12));
    CHECK(beampattern(theta, rotated, v, H) == doctest::Approx(bp).epsilon(1e-12));
  }
}

TEST_CASE("beampattern edge cases") {
  CMat H = CMat::Ones(1, 1);
  CVec w(1), v(1);
  w[0] = std::polar(std::sqrt(2.5), 0.4);
  v[0] = std::polar(1.0, -1.1);
  for (double theta : {-1.2, 0.0, 0.5, 1.5}) CHECK(beampattern(theta, std::vector<CVec>{w}, v, H) == doctest::Approx(2.5));

  std::mt19937_64 rng(2);
  const CMat H4 = random_cmat(rng, 4, 3);
  const std::vector<CVec> zeros{CVec::Zero(3), CVec::Zero(3)};
  CHECK(beampattern(0.3, zeros, unit_phases(rng, 4), H4) == 0.0);

  CHECK_THROWS_AS(beampattern(0.0, std::vector<CVec>{CVec::Zero(2)}, unit_phases(rng, 4), H4), DimensionError);
}

TEST_CASE("mbpg is the minimum over targets") {
  const Scenario s = validate(desk_scale_config(), AlgorithmConfig{});
  const ChannelSet ch = generate(s, 7);
  std::mt19937_64 rng(7);
  const std::vector<CVec> w{random_cvec(rng, 4), random_cvec(rng, 4)};
  const CVec v = unit_phases(rng, 16);
  const auto& targets = s.sys.target_angles;
  const double g0 = testing::beampattern_direct(targets[0], w, v, ch.H);
  const double g1 = testing::beampattern_direct(targets[1], w, v, ch.H);
  CHECK(mbpg(w, v, ch.H, targets) == doctest::Approx(std::min(g0, g1)).epsilon(1e-10));
  const auto gains = target_gains(w, v, ch.H, targets);
  CHECK(gains[0] == doctest::Approx(g0).epsilon(1e-10));
  CHECK(gains[1] == doctest::Approx(g1).epsilon(1e-10));

  const std::vector<double> single{targets[1]};
  CHECK(mbpg(w, v, ch.H, single) == doctest::Approx(g1).epsilon(1e-10));
  CHECK_THROWS(mbpg(w, v, ch.H, std::vector<double>{}));

  // Mirror-symmetric angles see the same pattern when every path is real.
  const CMat Hr = CMat::Ones(4, 1);
  const std::vector<CVec> wr{CVec::Ones(1)};
  const CVec vr = CVec::Ones(4);
  const std::vector<double> mirrored{-0.4, 0.4};
  const auto mg = target_gains(wr, vr, Hr, mirrored);
  CHECK(mg[0] == doctest::Approx(mg[1]).epsilon(1e-12));
}

TEST_CASE("rate requirements") {
  const Scenario s = validate(desk_scale_config(), AlgorithmConfig{});
  NomaState noma;
  noma.order = {{1, 0}, {0, 1}};
  noma.alpha = {0.3, 0.7, 0.4, 0.6};
  const auto sic = sinr_requirements(s, noma, SinrModel::Sic);
  REQUIRE(sic.size() == 4);
  const double gamma = s.gamma_th[0], noise = s.sys.noise_power;
  for (const auto& r : sic) {
    const int local = r.user - s.cluster_offset[r.cluster];
    const auto& order = noma.order[r.cluster];
    const bool last = order.back() == local;
    double later = 0.0;
    bool seen = false;
    for (int q : order) {
      if (seen) later += noma.alpha[s.user_index(r.cluster, q)];
      if (q == local) seen = true;
    }
    CHECK(r.kappa == doctest::Approx(gamma * later / noma.alpha[r.user]));
    CHECK(r.floor == doctest::Approx(gamma * noise / noma.alpha[r.user]));
    if (last) CHECK(r.kappa == 0.0);
  }
  const auto nosic = sinr_requirements(s, noma, SinrModel::NoSic);
  for (const auto& r : nosic) CHECK(r.kappa == doctest::Approx(gamma * (1.0 - noma.alpha[r.user]) / noma.alpha[r.user]));
  CHECK(sinr_requirements(s, noma, SinrModel::Disabled).empty());

  noma.alpha[0] = 0.0;
  CHECK_THROWS_AS(sinr_requirements(s, noma, SinrModel::Sic), Error);
}

TEST_CASE("user rates follow the decoding order") {
  const Scenario s = validate(desk_scale_config(), AlgorithmConfig{});
  NomaState noma;
  noma.order = {{1, 0}, {0, 1}};
  noma.alpha = {0.3, 0.7, 0.4, 0.6};
  const double n = s.sys.noise_power;
  const std::vector<double> gains{5 * n, 2 * n, 3 * n, 9 * n};
  const auto rates = user_rates(s, gains, noma, SinrModel::Sic);
  // Cluster 0 decodes user 1 first: it sees user 0's share as interference.
  const auto c0 = testing::cluster_rates({0.7, 0.3}, {2 * n, 5 * n}, n, true);
  const auto c1 = testing::cluster_rates({0.4, 0.6}, {3 * n, 9 * n}, n, true);
  CHECK(rates[1] == doctest::Approx(c0[0]));
  CHECK(rates[0] == doctest::Approx(c0[1]));
  CHECK(rates[2] == doctest::Approx(c1[0]));
  CHECK(rates[3] == doctest::Approx(c1[1]));

  const auto ns = user_rates(s, gains, noma, SinrModel::NoSic);
  const auto d0 = testing::cluster_rates({0.7, 0.3}, {2 * n, 5 * n}, n, false);
  CHECK(ns[0] == doctest::Approx(d0[1]));
  CHECK(ns[1] == doctest::Approx(d0[0]));
}
