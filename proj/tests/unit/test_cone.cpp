#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "risnoma/cone.hpp"
#include "risnoma/errors.hpp"

using namespace risnoma;

namespace {

RVec unit(int n, int i) {
  RVec e = RVec::Zero(n);
  e[i] = 1.0;
  return e;
}

CVec random_cvec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  CVec z(n);
  for (int i = 0; i < n; ++i) z[i] = {N(rng), N(rng)};
  return z;
}

}  // namespace

TEST_CASE("complex_to_real interleaves and round-trips exactly") {
  CVec z(1);
  z[0] = {1.0, 2.0};
  const RVec x = complex_to_real(z);
  REQUIRE(x.size() == 2);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 2.0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const CVec w = random_cvec(rng, 7);
    CHECK(real_to_complex(complex_to_real(w)) == w);
  }
  CHECK_THROWS_AS(real_to_complex(RVec::Zero(3)), DimensionError);
}

TEST_CASE("realified products match complex evaluation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 6;
    const CVec row = random_cvec(rng, m);
    const CVec w = random_cvec(rng, m);
    const RVec x = complex_to_real(w);

    const Complex direct = row.transpose() * w;
    const RVec parts = row_product_real(row, 0, 2 * m) * x;
    CHECK(std::norm(direct) == doctest::Approx(parts.squaredNorm()).epsilon(1e-12));

    // Re{u^H w} as a linear form.
    const CVec u = random_cvec(rng, m);
    const double re = (u.adjoint() * w)(0).real();
    CHECK(inner_product_real(u, 0, 2 * m).dot(x) == doctest::Approx(re).epsilon(1e-12));
  }
}

TEST_CASE("quadratic_to_soc is equivalent to the quadratic inequality") {
  SUBCASE("kappa = 0 reduces to rhs >= 0") {
    const CVec row = CVec::Ones(1);
    AffineForm rhs{RVec::Zero(2), 0.0};
    rhs.coeffs[0] = 1.0;  // rhs = Re w
    const auto soc = quadratic_to_soc(row, 0.0, rhs, 0);
    ConeProgram p(2);
    p.add_soc(soc);
    RVec x(2);
    x << 0.5, 3.0;
    CHECK(max_violation(p, x) <= 0.0);
    x << -0.5, 3.0;
    CHECK(max_violation(p, x) > 0.0);
  }
  SUBCASE("scalar cone: |w|^2 <= 4") {
    const CVec row = CVec::Ones(1);
    const AffineForm rhs{RVec::Zero(2), 4.0};
    ConeProgram p(2);
    p.add_soc(quadratic_to_soc(row, 1.0, rhs, 0));
    RVec x(2);
    x << 1.2, 1.5;  // |w|^2 = 3.69
    CHECK(max_violation(p, x) <= 0.0);
    x << 1.5, 1.5;  // 4.5
    CHECK(max_violation(p, x) > 0.0);
  }
  SUBCASE("sampling oracle on a random instance") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 1.0);
    const int m = 3, n = 2 * m;
    const CVec row = random_cvec(rng, m);
    AffineForm rhs{RVec::Zero(n), 2.0};
    for (int i = 0; i < n; ++i) rhs.coeffs[i] = N(rng);
    const double kappa = 0.7;
    ConeProgram p(n);
    p.add_soc(quadratic_to_soc(row, kappa, rhs, 0));
    int agree = 0;
    for (int s = 0; s < 1000; ++s) {
      RVec x(n);
      for (int i = 0; i < n; ++i) x[i] = N(rng);
      const double quad = kappa * std::norm(Complex(row.transpose() * real_to_complex(x))) - rhs(x);
      const bool quad_ok = quad <= 0.0;
      const bool cone_ok = max_violation(p, x) <= 0.0;
      agree += (quad_ok == cone_ok) || std::abs(quad) < 1e-12;
    }
    CHECK(agree == 1000);
  }
  CHECK_THROWS_AS(quadratic_to_soc(CVec::Ones(1), -1.0, AffineForm{RVec::Zero(2), 0.0}, 0), Error);
}

TEST_CASE("trivial programs") {
  SUBCASE("maximize t s.t. t <= 5") {
    ConeProgram p(1);
    p.objective[0] = 1.0;
    p.add_ineq(unit(1, 0), 5.0);
    const auto sol = solve(p);
    REQUIRE(sol.status == ConeStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(5.0).epsilon(1e-7));
  }
  SUBCASE("support function of the unit ball") {
    ConeProgram p(3);
    p.objective << 1.0, -2.0, 2.0;
    p.add_soc({RMat::Identity(3, 3), RVec::Zero(3), RVec::Zero(3), 1.0});
    const auto sol = solve(p);
    REQUIRE(sol.status == ConeStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(3.0).epsilon(1e-7));
    CHECK((sol.x - p.objective / 3.0).norm() < 1e-4);
  }
  SUBCASE("t <= 1 and t >= 2 is infeasible") {
    ConeProgram p(1);
    p.objective[0] = 1.0;
    p.add_ineq(unit(1, 0), 1.0);
    p.add_ineq(-unit(1, 0), -2.0);
    CHECK(solve(p).status == ConeStatus::Infeasible);
  }
  SUBCASE("unbounded objective") {
    ConeProgram p(2);
    p.objective << 1.0, 0.0;
    p.add_ineq(unit(2, 1), 1.0);
    CHECK(solve(p).status == ConeStatus::Unbounded);
  }
  SUBCASE("equality constraints are honored") {
    ConeProgram p(2);
    p.objective << 1.0, 1.0;
    RVec a(2);
    a << 1.0, -1.0;
    p.add_eq(a, 0.5);
    p.add_soc({RMat::Identity(2, 2), RVec::Zero(2), RVec::Zero(2), 1.0});
    const auto sol = solve(p);
    REQUIRE(sol.status == ConeStatus::Optimal);
    CHECK(std::abs(sol.x[0] - sol.x[1] - 0.5) < 1e-9);
    // x0 = x1 + 0.5 on the unit circle: 2 x1^2 + x1 - 0.75 = 0.
    CHECK(sol.objective_value == doctest::Approx(std::sqrt(7.0) / 2.0).epsilon(1e-7));
  }
  SUBCASE("iteration cap") {
    ConeProgram p(3);
    p.objective << 1.0, 1.0, 1.0;
    p.add_soc({RMat::Identity(3, 3), RVec::Zero(3), RVec::Zero(3), 1.0});
    const auto sol = solve(p, {1e-8, 2});
    CHECK(sol.status == ConeStatus::IterationLimit);
  }
}

TEST_CASE("random programs agree with the first-order oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 9;
    const auto rp = testing::random_program(rng, n);
    const auto sol = solve(rp.program);
    REQUIRE(sol.status == ConeStatus::Optimal);
    CHECK(sol.max_primal_residual <= 1e-8);
    const auto ref = testing::first_order_oracle(rp.program);
    CHECK(ref.violation < 1e-7);
    CHECK(sol.objective_value == doctest::Approx(ref.objective).epsilon(1e-5));
    CHECK(std::abs(sol.objective_value - ref.objective) <= 1e-5 * (1.0 + std::abs(ref.objective)));

    // No feasible perturbation improves on the reported optimum.
    std::normal_distribution<double> N(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      RVec d(n);
      for (int i = 0; i < n; ++i) d[i] = N(rng);
      for (double step : {1e-1, 1e-3, 1e-5}) {
        const RVec x = sol.x + step * d;
        if (max_violation(rp.program, x) <= 0.0) {
          CHECK(rp.program.objective.dot(x) <= sol.objective_value + 1e-8 * (1.0 + std::abs(sol.objective_value)));
        }
      }
    }
  }
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(99);
  const auto rp = testing::random_program(rng, 6);
  const auto a = solve(rp.program);
  const auto b = solve(rp.program);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("program dump round-trips") {
  std::mt19937_64 rng(7);
  const auto rp = testing::random_program(rng, 5);
  std::stringstream ss;
  dump_program(rp.program, ss);
  const ConeProgram back = load_program(ss);
  CHECK(back.n == rp.program.n);
  CHECK(back.objective == rp.program.objective);
  REQUIRE(back.soc_constraints.size() == rp.program.soc_constraints.size());
  CHECK(back.soc_constraints[0].F == rp.program.soc_constraints[0].F);
  CHECK(solve(back).objective_value == solve(rp.program).objective_value);
}

TEST_CASE("malformed programs are rejected") {
  ConeProgram p(2);
  p.add_ineq(RVec::Zero(3), 1.0);
  CHECK_THROWS_AS(solve(p), DimensionError);
}
