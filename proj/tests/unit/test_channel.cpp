#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "risnoma/channel.hpp"
#include "risnoma/errors.hpp"

using namespace risnoma;

namespace {

CVec random_cvec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  CVec z(n);
  for (int i = 0; i < n; ++i) z[i] = {N(rng), N(rng)};
  return z;
}

CMat random_cmat(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> N(0.0, 1.0);
  CMat A(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) A(i, j) = {N(rng), N(rng)};
  return A;
}

Scenario desk(double kappa = db_to_linear(3.0)) {
  SystemConfig sys = desk_scale_config();
  sys.rician_factor = kappa;
  return validate(sys, AlgorithmConfig{});
}

}  // namespace

TEST_CASE("steering vectors") {
  const CVec a0 = steering_vector(0.0, 4);
  for (const auto& z : a0) CHECK(std::abs(z - Complex(1.0, 0.0)) < 1e-15);
  const CVec a1 = steering_vector(kPi / 2, 2);
  CHECK(std::abs(a1[0] - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(a1[1] - Complex(-1.0, 0.0)) < 1e-15);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-kPi / 2, kPi / 2);
  for (int trial = 0; trial < 50; ++trial) {
    const CVec a = steering_vector(U(rng), 16);
    for (const auto& z : a) CHECK(std::abs(std::abs(z) - 1.0) < 1e-15);
    CHECK(std::real(a.dot(a)) == doctest::Approx(16.0).epsilon(1e-15));
  }
}

TEST_CASE("path loss") {
  CHECK(path_loss(1.0, 2.2, 1e-3) == doctest::Approx(1e-3));
  CHECK(path_loss(10.0, 2.0, 1e-3) == doctest::Approx(1e-5));
  CHECK(path_loss(0.5, 2.8, 1e-3) == path_loss(1.0, 2.8, 1e-3));
}

TEST_CASE("array angles measured from broadside") {
  CHECK(array_angle({0, 0}, {0, 5}) == doctest::Approx(0.0));
  CHECK(array_angle({0, 0}, {5, 0}) == doctest::Approx(kPi / 2));
  CHECK(array_angle({0, 0}, {-5, 5}) == doctest::Approx(-kPi / 4));
}

TEST_CASE("generation is deterministic in the seed") {
  const Scenario s = desk();
  const ChannelSet a = generate(s, 42);
  const ChannelSet b = generate(s, 42);
  const ChannelSet c = generate(s, 43);
  CHECK(a.H == b.H);
  for (int k = 0; k < s.K; ++k) CHECK(a.user_rows[k] == b.user_rows[k]);
  CHECK(a.H != c.H);
  CHECK(a.N_s() == 16);
  CHECK(a.M() == 4);
  CHECK(a.H.allFinite());
}

TEST_CASE("pure line of sight has constant magnitudes") {
  const Scenario s = desk(std::numeric_limits<double>::infinity());
  const ChannelSet ch = generate(s, 3);
  const double amp = std::sqrt(ch.geometry.loss_bs_ris);
  for (Eigen::Index i = 0; i < ch.H.size(); ++i) CHECK(std::abs(ch.H(i)) == doctest::Approx(amp).epsilon(1e-13));
  for (int k = 0; k < s.K; ++k) {
    const double ak = std::sqrt(ch.geometry.loss_ris_user[k]);
    for (const auto& z : ch.user_rows[k]) CHECK(std::abs(z) == doctest::Approx(ak).epsilon(1e-13));
  }
}

TEST_CASE("entry power matches the path loss in expectation") {
  const Scenario s = desk();
  double sum = 0.0;
  long count = 0;
  std::uint64_t seed = 1000;
  while (count < 100000) {
    const ChannelSet ch = generate(s, seed++);
    for (Eigen::Index i = 0; i < ch.H.size() && count < 100000; ++i, ++count)
      sum += std::norm(ch.H(i)) / ch.geometry.loss_bs_ris;
  }
  const double mean = sum / static_cast<double>(count);
  CHECK(mean >= 0.97);
  CHECK(mean <= 1.03);
}

TEST_CASE("cascaded rows match the reflection-matrix form") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int N = 1 + trial % 9, M = 1 + trial % 5;
    const CVec h = random_cvec(rng, N);
    const CVec v = random_cvec(rng, N);
    const CMat H = random_cmat(rng, N, M);
    // h^H Phi H with Phi = diag(conj v), h the stored row.
    CVec reference = CVec::Zero(M);
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N; ++n) reference[m] += h[n] * std::conj(v[n]) * H(n, m);
    const CVec direct = (h.transpose() * reflection_matrix(v) * H).transpose();
    const CVec row = cascaded(h, v, H);
    CHECK((row - reference).norm() <= 1e-12 * reference.norm());
    CHECK((row - direct).norm() <= 1e-12 * reference.norm());
  }

  CMat H1(1, 3);
  H1 << Complex(1, 2), Complex(3, -1), Complex(0, 1);
  CVec one = CVec::Ones(1), h(1);
  h[0] = {2.0, 1.0};
  CHECK((cascaded(h, one, H1) - (h[0] * H1.row(0)).transpose()).norm() < 1e-15);

  const CMat H = random_cmat(rng, 4, 3);
  const CVec sums = H.colwise().sum().transpose();
  CHECK((cascaded(CVec::Ones(4), CVec::Ones(4), H) - sums).norm() < 1e-12);

  CHECK_THROWS_AS(cascaded(CVec::Ones(3), CVec::Ones(4), H), DimensionError);
}

TEST_CASE("effective gain") {
  CVec row(2), w(2);
  row << Complex(1, 0), Complex(0, 1);
  w << Complex(1, 0), Complex(0, -1);
  CHECK(effective_gain(row, w) == doctest::Approx(4.0));
}

TEST_CASE("channel dump round-trips") {
  const Scenario s = desk();
  const ChannelSet ch = generate(s, 11);
  std::stringstream ss;
  dump_channels(ch, ss);
  const ChannelSet back = load_channels(ss);
  CHECK((back.H - ch.H).norm() == 0.0);
  REQUIRE(back.user_rows.size() == ch.user_rows.size());
  for (std::size_t k = 0; k < ch.user_rows.size(); ++k) CHECK((back.user_rows[k] - ch.user_rows[k]).norm() == 0.0);

  std::stringstream bad("garbage");
  CHECK_THROWS(load_channels(bad));
}
