#include "risnoma/cone.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "risnoma/errors.hpp"

namespace risnoma {

const char* to_string(ConeStatus status) {
  switch (status) {
    case ConeStatus::Optimal: return "Optimal";
    case ConeStatus::Infeasible: return "Infeasible";
    case ConeStatus::Unbounded: return "Unbounded";
    case ConeStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

namespace {

bool all_finite(const RMat& m) { return m.allFinite(); }

}  // namespace

void ConeProgram::check() const {
  if (n < 0) throw DimensionError("ConeProgram: negative dimension");
  if (objective.size() != n) throw DimensionError("ConeProgram: objective length must equal n");
  if (!objective.allFinite()) throw Error("ConeProgram: non-finite objective");
  auto check_rows = [&](const std::vector<LinearRow>& rows, const char* what) {
    for (const auto& r : rows) {
      if (r.a.size() != n) throw DimensionError(std::string("ConeProgram: ") + what + " row length must equal n");
      if (!r.a.allFinite() || !std::isfinite(r.b)) throw Error(std::string("ConeProgram: non-finite ") + what);
    }
  };
  check_rows(linear_ineqs, "inequality");
  check_rows(linear_eqs, "equality");
  for (const auto& c : soc_constraints) {
    if (c.F.cols() != n || c.p.size() != n || c.g.size() != c.F.rows()) {
      throw DimensionError("ConeProgram: cone data dimensions are inconsistent");
    }
    if (!all_finite(c.F) || !c.g.allFinite() || !c.p.allFinite() || !std::isfinite(c.q)) {
      throw Error("ConeProgram: non-finite cone data");
    }
  }
}

double max_violation(const ConeProgram& program, const RVec& x) {
  double worst = 0.0;
  for (const auto& r : program.linear_ineqs) worst = std::max(worst, r.a.dot(x) - r.b);
  for (const auto& r : program.linear_eqs) worst = std::max(worst, std::abs(r.a.dot(x) - r.b));
  for (const auto& c : program.soc_constraints) {
    worst = std::max(worst, (c.F * x + c.g).norm() - (c.p.dot(x) + c.q));
  }
  return worst;
}

namespace {

// ---------------------------------------------------------------------------
// Log barrier over y in R^n:
//   -sum log(b - A y) - sum log((p.y_S + q)^2 - ||F y_S + g||^2)

struct Cone {
  std::vector<int> support;
  RMat F;    // k x |S|
  RMat FtF;  // |S| x |S|
  RVec g;
  RVec p;    // |S|
  double q = 0.0;
};

struct Barrier {
  int n = 0;
  RMat A;  // m x n
  RVec b;
  std::vector<Cone> cones;

  double theta() const { return static_cast<double>(A.rows()) + 2.0 * static_cast<double>(cones.size()); }
};

Cone make_cone(RMat F, RVec g, RVec p, double q, const std::vector<int>* support = nullptr) {
  Cone c;
  if (support) {
    c.support = *support;
  } else {
    for (Eigen::Index j = 0; j < F.cols(); ++j) {
      if (p[j] != 0.0 || F.col(j).cwiseAbs().maxCoeff() != 0.0) c.support.push_back(static_cast<int>(j));
    }
  }
  const auto s = static_cast<Eigen::Index>(c.support.size());
  if (support) {
    c.F = std::move(F);
    c.p = std::move(p);
  } else {
    c.F.resize(F.rows(), s);
    c.p.resize(s);
    for (Eigen::Index j = 0; j < s; ++j) {
      c.F.col(j) = F.col(c.support[j]);
      c.p[j] = p[c.support[j]];
    }
  }
  c.FtF = c.F.transpose() * c.F;
  c.g = std::move(g);
  c.q = q;
  return c;
}

RVec gather(const RVec& y, const std::vector<int>& idx) {
  RVec out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[idx[i]];
  return out;
}

// Barrier value; +inf outside the domain.
double barrier_value(const Barrier& B, const RVec& y) {
  double phi = 0.0;
  if (B.A.rows() > 0) {
    const RVec slack = B.b - B.A * y;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      if (!(slack[i] > 0.0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(slack[i]);
    }
  }
  for (const auto& c : B.cones) {
    const RVec ys = gather(y, c.support);
    const double u = c.p.dot(ys) + c.q;
    const double nr = (c.F * ys + c.g).norm();
    const double lo = u - nr;
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    phi -= std::log(lo) + std::log(u + nr);
  }
  return phi;
}

void barrier_derivatives(const Barrier& B, const RVec& y, RVec& grad, RMat& hess) {
  grad.setZero(B.n);
  hess.setZero(B.n, B.n);
  if (B.A.rows() > 0) {
    const RVec inv = (B.b - B.A * y).cwiseInverse();
    grad.noalias() += B.A.transpose() * inv;
    const RMat scaled = inv.asDiagonal() * B.A;
    hess.noalias() += scaled.transpose() * scaled;
  }
  for (const auto& c : B.cones) {
    const RVec ys = gather(y, c.support);
    const double u = c.p.dot(ys) + c.q;
    const RVec r = c.F * ys + c.g;
    const double nr = r.norm();
    const double D = (u - nr) * (u + nr);
    const RVec dD = 2.0 * u * c.p - 2.0 * c.F.transpose() * r;
    const double inv_d = 1.0 / D;
    const auto s = c.support.size();
    for (std::size_t i = 0; i < s; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      grad[c.support[i]] -= dD[ii] * inv_d;
      for (std::size_t j = 0; j < s; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        hess(c.support[i], c.support[j]) +=
            2.0 * inv_d * (c.FtF(ii, jj) - c.p[ii] * c.p[jj]) + dD[ii] * dD[jj] * inv_d * inv_d;
      }
    }
  }
}

// Solves hess * dx = rhs on the diagonally scaled system, regularizing when
// the factorization fails.
RVec solve_spd(const RMat& hess, const RVec& rhs) {
  const RVec d = hess.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const RMat S = d.asDiagonal() * hess * d.asDiagonal();
  const RVec srhs = d.cwiseProduct(rhs);
  Eigen::LLT<RMat> llt(S);
  if (llt.info() == Eigen::Success) return d.cwiseProduct(llt.solve(srhs));
  double reg = 1e-14;
  const RMat I = RMat::Identity(S.rows(), S.cols());
  for (int attempt = 0; attempt < 8; ++attempt, reg *= 100.0) {
    llt.compute(S + reg * I);
    if (llt.info() == Eigen::Success) return d.cwiseProduct(llt.solve(srhs));
  }
  return d.cwiseProduct(S.completeOrthogonalDecomposition().solve(srhs));
}

constexpr int kCenterSteps = 50;

enum class CenterOutcome { Centered, EarlyStop, IterationLimit };

struct Budget {
  int used = 0;
  int limit = 0;
};

// Damped Newton on t c.y + phi(y), started from a strictly feasible y.
template <typename Stop>
CenterOutcome center(const Barrier& B, const RVec& c, double t, RVec& y, Budget& budget, Stop&& early_stop) {
  RVec grad;
  RMat hess;
  double phi = barrier_value(B, y);
  for (int steps = 0;; ++steps) {
    if (budget.used >= budget.limit) return CenterOutcome::IterationLimit;
    // Slow progress at this weight means rounding dominates the Newton
    // direction; the next weight starts from here.
    if (steps >= kCenterSteps) return CenterOutcome::Centered;
    barrier_derivatives(B, y, grad, hess);
    grad.noalias() += t * c;
    const RVec dy = solve_spd(hess, -grad);
    const double decrement = -grad.dot(dy);
    if (!(decrement > 2e-10)) return CenterOutcome::Centered;

    // Armijo test on the change in t c.y + phi, evaluated without forming
    // the (possibly huge) objective itself.
    const double slope = t * c.dot(dy);
    double step = 1.0;
    double phi_new = 0.0;
    bool accepted = false;
    RVec y_new;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      y_new = y + step * dy;
      phi_new = barrier_value(B, y_new);
      if (!std::isfinite(phi_new)) continue;
      const double change = step * slope + (phi_new - phi);
      if (change <= -0.25 * step * decrement && change < 0.0 && y_new != y) {
        accepted = true;
        break;
      }
    }
    ++budget.used;
    // No sufficient decrease left at working precision: the point is as
    // centered as rounding allows.
    if (!accepted) return CenterOutcome::Centered;
    y = std::move(y_new);
    phi = phi_new;
    if (early_stop(y)) return CenterOutcome::EarlyStop;
  }
}

constexpr double kBarrierGrowth = 30.0;

// Reduction of the user program to inequality-only form in y, x = x0 + Z y.
struct Reduced {
  RVec x0;
  RMat Z;  // empty when there are no equalities (Z = I)
  Barrier base;
  RVec c;  // maximize c.y
  double c_offset = 0.0;
};

Reduced reduce(const ConeProgram& prog, double tol, bool& eq_infeasible) {
  Reduced red;
  const int n = prog.n;
  eq_infeasible = false;
  const bool has_eq = !prog.linear_eqs.empty();
  red.x0 = RVec::Zero(n);
  int ny = n;
  if (has_eq) {
    const auto me = static_cast<Eigen::Index>(prog.linear_eqs.size());
    RMat Aeq(me, n);
    RVec beq(me);
    for (Eigen::Index i = 0; i < me; ++i) {
      Aeq.row(i) = prog.linear_eqs[i].a.transpose();
      beq[i] = prog.linear_eqs[i].b;
    }
    red.x0 = Aeq.completeOrthogonalDecomposition().solve(beq);
    if ((Aeq * red.x0 - beq).cwiseAbs().maxCoeff() > tol * (1.0 + beq.cwiseAbs().maxCoeff())) {
      eq_infeasible = true;
      return red;
    }
    Eigen::ColPivHouseholderQR<RMat> qr(Aeq.transpose());
    const auto rank = qr.rank();
    const RMat Q = qr.householderQ();
    red.Z = Q.rightCols(n - rank);
    ny = static_cast<int>(n - rank);
  }

  auto map_row = [&](const RVec& a) -> RVec { return has_eq ? RVec(red.Z.transpose() * a) : a; };

  Barrier& B = red.base;
  B.n = ny;
  const auto mi = static_cast<Eigen::Index>(prog.linear_ineqs.size());
  B.A.resize(mi, ny);
  B.b.resize(mi);
  for (Eigen::Index i = 0; i < mi; ++i) {
    const auto& row = prog.linear_ineqs[i];
    B.A.row(i) = map_row(row.a).transpose();
    B.b[i] = row.b - row.a.dot(red.x0);
  }
  for (const auto& s : prog.soc_constraints) {
    if (has_eq) {
      B.cones.push_back(make_cone(s.F * red.Z, s.F * red.x0 + s.g, red.Z.transpose() * s.p, s.p.dot(red.x0) + s.q));
    } else {
      B.cones.push_back(make_cone(s.F, s.g, s.p, s.q));
    }
  }
  red.c = map_row(prog.objective);
  red.c_offset = prog.objective.dot(red.x0);
  return red;
}

RVec expand(const Reduced& red, const RVec& y) {
  if (red.Z.size() == 0 && red.x0.size() == y.size()) return red.x0 + y;
  return red.x0 + red.Z * y;
}

Cone ball_cone(int n_total, int n_ball, const RVec& center, double radius) {
  std::vector<int> support(static_cast<std::size_t>(n_ball));
  for (int i = 0; i < n_ball; ++i) support[static_cast<std::size_t>(i)] = i;
  (void)n_total;
  return make_cone(RMat::Identity(n_ball, n_ball), -center.head(n_ball), RVec::Zero(n_ball), radius, &support);
}

// Adds slack variable s (last coordinate): every constraint loosened by s.
Barrier phase_one_barrier(const Barrier& base, const RVec& ball_center, double ball_radius, double s_floor) {
  Barrier B;
  B.n = base.n + 1;
  const auto m = base.A.rows();
  B.A.resize(m + 1, B.n);
  B.b.resize(m + 1);
  if (m > 0) {
    B.A.topLeftCorner(m, base.n) = base.A;
    B.A.col(base.n).head(m).setConstant(-1.0);
    B.b.head(m) = base.b;
  }
  B.A.row(m).setZero();
  B.A(m, base.n) = -1.0;  // -s <= -s_floor
  B.b[m] = -s_floor;
  for (const auto& c : base.cones) {
    Cone e = c;
    e.support.push_back(base.n);
    e.F.conservativeResize(Eigen::NoChange, e.F.cols() + 1);
    e.F.col(e.F.cols() - 1).setZero();
    e.p.conservativeResize(e.p.size() + 1);
    e.p[e.p.size() - 1] = 1.0;
    e.FtF = e.F.transpose() * e.F;
    B.cones.push_back(std::move(e));
  }
  B.cones.push_back(ball_cone(B.n, base.n, ball_center, ball_radius));
  return B;
}

Barrier relaxed_with_ball(const Barrier& base, double relax, const RVec& ball_center, double ball_radius) {
  Barrier B = base;
  if (relax > 0.0) {
    B.b.array() += relax;
    for (auto& c : B.cones) c.q += relax;
  }
  B.cones.push_back(ball_cone(B.n, B.n, ball_center, ball_radius));
  return B;
}

double max_slack_violation(const Barrier& base, const RVec& y) {
  double worst = -std::numeric_limits<double>::infinity();
  if (base.A.rows() > 0) worst = (base.A * y - base.b).maxCoeff();
  for (const auto& c : base.cones) {
    const RVec ys = gather(y, c.support);
    worst = std::max(worst, (c.F * ys + c.g).norm() - (c.p.dot(ys) + c.q));
  }
  return worst;
}

}  // namespace

ConeSolution solve(const ConeProgram& program, const SolverOptions& options) {
  program.check();
  const double tol = options.tol;
  ConeSolution out;
  out.x = RVec::Zero(program.n);

  bool eq_infeasible = false;
  const Reduced red = reduce(program, tol, eq_infeasible);
  if (eq_infeasible) {
    out.status = ConeStatus::Infeasible;
    out.max_primal_residual = max_violation(program, out.x);
    return out;
  }
  const Barrier& base = red.base;
  const int ny = base.n;
  Budget budget{0, options.max_iterations};

  auto finish = [&](ConeStatus status, const RVec& y, double gap) {
    out.status = status;
    out.x = expand(red, y);
    out.objective_value = program.objective.dot(out.x);
    out.max_primal_residual = max_violation(program, out.x);
    out.gap_bound = gap;
    out.iterations = budget.used;
    return out;
  };

  RVec y = RVec::Zero(ny);
  const double ball_radius = 1e6 * (1.0 + y.norm());
  double relax = 0.0;

  // Phase one: minimize s subject to every constraint loosened by s.
  const double initial_violation = max_slack_violation(base, y);
  if (!(initial_violation < 0.0) || !std::isfinite(barrier_value(base, y))) {
    const double s_floor = -1.0;
    Barrier P1 = phase_one_barrier(base, RVec::Zero(ny), ball_radius, s_floor);
    RVec z(ny + 1);
    z.head(ny) = y;
    z[ny] = std::max(initial_violation, 0.0) + 1.0;
    RVec c1 = RVec::Zero(ny + 1);
    c1[ny] = 1.0;  // minimize s
    const double theta1 = P1.theta();
    const double margin = 0.1;
    double t = 1.0;
    bool found = false;
    for (;;) {
      auto outcome = center(P1, c1, t, z, budget, [&](const RVec& zz) { return zz[ny] < -margin; });
      if (outcome == CenterOutcome::EarlyStop) {
        found = true;
        break;
      }
      if (outcome == CenterOutcome::IterationLimit) return finish(ConeStatus::IterationLimit, z.head(ny), 0.0);
      const double gap = theta1 / t;
      const double s = z[ny];
      if (s - gap > tol) {
        out.status = ConeStatus::Infeasible;
        return finish(ConeStatus::Infeasible, z.head(ny), 0.0);
      }
      if (s < 0.0 && gap < 0.5 * std::abs(s)) {
        found = true;
        break;
      }
      if (gap < 0.1 * tol) {
        if (s > tol) return finish(ConeStatus::Infeasible, z.head(ny), 0.0);
        break;  // feasible only to tolerance: relax below
      }
      t *= kBarrierGrowth;
    }
    y = z.head(ny);
    const double s = z[ny];
    if (!found || s > -tol) relax = std::max(s, 0.0) + tol;
  }

  // Phase two: follow the central path of max c.y.
  const Barrier P2 = relaxed_with_ball(base, relax, y, ball_radius);
  const RVec c2 = -red.c;  // minimize -c.y
  const double theta2 = P2.theta();
  double t = 1.0;
  for (;;) {
    auto outcome = center(P2, c2, t, y, budget, [](const RVec&) { return false; });
    if (outcome == CenterOutcome::IterationLimit) return finish(ConeStatus::IterationLimit, y, theta2 / t);
    const double value = red.c.dot(y) + red.c_offset;
    const double gap = theta2 / t;
    if (gap <= tol * (1.0 + std::abs(value))) break;
    t *= kBarrierGrowth;
  }
  const RVec& ball_center = P2.cones.back().g;
  if ((y + ball_center).norm() > 0.999 * ball_radius) return finish(ConeStatus::Unbounded, y, theta2 / t);
  return finish(ConeStatus::Optimal, y, theta2 / t);
}

// ---------------------------------------------------------------------------
// Complex -> real bridge

RVec complex_to_real(const CVec& z) {
  RVec x(2 * z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    x[2 * k] = z[k].real();
    x[2 * k + 1] = z[k].imag();
  }
  return x;
}

CVec real_to_complex(const RVec& x) {
  if (x.size() % 2 != 0) throw DimensionError("real_to_complex: odd length");
  CVec z(x.size() / 2);
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = {x[2 * k], x[2 * k + 1]};
  return z;
}

RMat row_product_real(const CVec& row, int offset, int n) {
  if (offset < 0 || offset + 2 * row.size() > n) throw DimensionError("row_product_real: slot out of range");
  RMat R = RMat::Zero(2, n);
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    const double hr = row[k].real();
    const double hi = row[k].imag();
    R(0, offset + 2 * k) = hr;
    R(0, offset + 2 * k + 1) = -hi;
    R(1, offset + 2 * k) = hi;
    R(1, offset + 2 * k + 1) = hr;
  }
  return R;
}

RVec inner_product_real(const CVec& u, int offset, int n) {
  if (offset < 0 || offset + 2 * u.size() > n) throw DimensionError("inner_product_real: slot out of range");
  RVec c = RVec::Zero(n);
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    c[offset + 2 * k] = u[k].real();
    c[offset + 2 * k + 1] = u[k].imag();
  }
  return c;
}

SocConstraint quadratic_to_soc(const CVec& row, double kappa, const AffineForm& rhs, int offset) {
  if (kappa < 0.0) throw Error("quadratic_to_soc: negative kappa");
  const auto n = static_cast<int>(rhs.coeffs.size());
  SocConstraint c;
  c.F = RMat::Zero(3, n);
  c.g = RVec::Zero(3);
  if (kappa > 0.0) c.F.topRows(2) = 2.0 * std::sqrt(kappa) * row_product_real(row, offset, n);
  c.F.row(2) = rhs.coeffs.transpose();
  c.g[2] = rhs.constant - 1.0;
  c.p = rhs.coeffs;
  c.q = rhs.constant + 1.0;
  return c;
}

namespace {

Complex block_product(const QuadraticTerm& term, const RVec& x) {
  const auto len = term.row.size();
  if (term.offset < 0 || term.offset + 2 * len > x.size()) throw DimensionError("quadratic term: slot out of range");
  Complex c{0.0, 0.0};
  for (Eigen::Index k = 0; k < len; ++k) c += term.row[k] * Complex(x[term.offset + 2 * k], x[term.offset + 2 * k + 1]);
  return c;
}

}  // namespace

AffineForm quadratic_minorant(const std::vector<QuadraticTerm>& terms, const RVec& x_prev) {
  const auto n = static_cast<int>(x_prev.size());
  AffineForm f{RVec::Zero(n), 0.0};
  for (const auto& term : terms) {
    const Complex c = block_product(term, x_prev);
    const RMat R = row_product_real(term.row, term.offset, n);
    f.coeffs += 2.0 * (c.real() * R.row(0) + c.imag() * R.row(1)).transpose();
    f.constant -= std::norm(c);
  }
  return f;
}

double quadratic_value(const std::vector<QuadraticTerm>& terms, const RVec& x) {
  double total = 0.0;
  for (const auto& term : terms) total += std::norm(block_product(term, x));
  return total;
}

// ---------------------------------------------------------------------------
// Program dump

namespace {

void write_vec(std::ostream& out, const RVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << v[i];
  }
  out << '\n';
}

RVec read_vec(std::istream& in, Eigen::Index n) {
  RVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> v[i])) throw Error("load_program: truncated file");
  }
  return v;
}

void expect(std::istream& in, const char* keyword) {
  std::string word;
  if (!(in >> word) || word != keyword) throw Error(std::string("load_program: expected '") + keyword + "'");
}

}  // namespace

void dump_program(const ConeProgram& p, std::ostream& out) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "risnoma-cone 1\n";
  out << "n " << p.n << '\n';
  out << "objective\n";
  write_vec(out, p.objective);
  out << "ineq " << p.linear_ineqs.size() << '\n';
  for (const auto& r : p.linear_ineqs) {
    write_vec(out, r.a);
    out << r.b << '\n';
  }
  out << "eq " << p.linear_eqs.size() << '\n';
  for (const auto& r : p.linear_eqs) {
    write_vec(out, r.a);
    out << r.b << '\n';
  }
  out << "soc " << p.soc_constraints.size() << '\n';
  for (const auto& c : p.soc_constraints) {
    out << c.F.rows() << '\n';
    for (Eigen::Index i = 0; i < c.F.rows(); ++i) write_vec(out, c.F.row(i).transpose());
    write_vec(out, c.g);
    write_vec(out, c.p);
    out << c.q << '\n';
  }
  out.precision(old);
}

ConeProgram load_program(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "risnoma-cone" || version != 1) throw Error("load_program: unrecognized header");
  int n = 0;
  expect(in, "n");
  in >> n;
  ConeProgram p(n);
  expect(in, "objective");
  p.objective = read_vec(in, n);
  std::size_t count = 0;
  expect(in, "ineq");
  in >> count;
  for (std::size_t i = 0; i < count; ++i) {
    RVec a = read_vec(in, n);
    double b = read_vec(in, 1)[0];
    p.add_ineq(std::move(a), b);
  }
  expect(in, "eq");
  in >> count;
  for (std::size_t i = 0; i < count; ++i) {
    RVec a = read_vec(in, n);
    double b = read_vec(in, 1)[0];
    p.add_eq(std::move(a), b);
  }
  expect(in, "soc");
  in >> count;
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::Index k = 0;
    in >> k;
    SocConstraint c;
    c.F.resize(k, n);
    for (Eigen::Index r = 0; r < k; ++r) c.F.row(r) = read_vec(in, n).transpose();
    c.g = read_vec(in, k);
    c.p = read_vec(in, n);
    c.q = read_vec(in, 1)[0];
    p.add_soc(std::move(c));
  }
  p.check();
  return p;
}

}  // namespace risnoma
