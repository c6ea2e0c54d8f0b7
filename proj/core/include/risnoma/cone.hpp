#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "risnoma/types.hpp"

namespace risnoma {

/// a . x <= b (or == b for equality rows).
struct LinearRow {
  RVec a;
  double b = 0.0;
};

/// ||F x + g||_2 <= p . x + q
struct SocConstraint {
  RMat F;
  RVec g;
  RVec p;
  double q = 0.0;
};

/// Linear objective over real variables with linear and second-order-cone
/// constraints. The objective is maximized.
struct ConeProgram {
  int n = 0;
  RVec objective;
  std::vector<LinearRow> linear_ineqs;
  std::vector<LinearRow> linear_eqs;
  std::vector<SocConstraint> soc_constraints;

  explicit ConeProgram(int dim = 0) : n(dim), objective(RVec::Zero(dim)) {}

  void add_ineq(RVec a, double b) { linear_ineqs.push_back({std::move(a), b}); }
  void add_eq(RVec a, double b) { linear_eqs.push_back({std::move(a), b}); }
  void add_soc(SocConstraint c) { soc_constraints.push_back(std::move(c)); }

  /// Throws DimensionError on inconsistent sizes, Error on non-finite data.
  void check() const;
};

enum class ConeStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(ConeStatus status);

struct ConeSolution {
  ConeStatus status = ConeStatus::IterationLimit;
  RVec x;
  double objective_value = 0.0;
  double max_primal_residual = 0.0;
  double gap_bound = 0.0;  ///< certified objective suboptimality when Optimal
  int iterations = 0;      ///< Newton steps over both phases
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 400;
};

/// Two-phase log-barrier interior-point method. Phase one either finds a
/// strictly feasible point or certifies that the constraints cannot be met
/// within `tol`; phase two follows the central path until the duality-gap
/// bound drops below tol * (1 + |objective|).
ConeSolution solve(const ConeProgram& program, const SolverOptions& options = {});

/// Value of the worst violated constraint at x (0 when feasible).
double max_violation(const ConeProgram& program, const RVec& x);

// ---------------------------------------------------------------------------
// Complex -> real bridge. Complex vectors are realified by interleaving
// (Re z_0, Im z_0, Re z_1, ...).

RVec complex_to_real(const CVec& z);
CVec real_to_complex(const RVec& x);

/// Affine real form coeffs . x + constant over the full variable vector.
struct AffineForm {
  RVec coeffs;
  double constant = 0.0;

  double operator()(const RVec& x) const { return coeffs.dot(x) + constant; }
};

/// 2 x n matrix R with [Re(row^T w); Im(row^T w)] = R x, where w occupies
/// the realified slots [offset, offset + 2 * row.size()) of x.
RMat row_product_real(const CVec& row, int offset, int n);

/// Coefficients c with Re{u^H w} = c . x for w stored at `offset`.
RVec inner_product_real(const CVec& u, int offset, int n);

/// Encodes kappa |row^T w|^2 <= rhs(x) as
/// ||(2 sqrt(kappa) Re, 2 sqrt(kappa) Im, rhs - 1)|| <= rhs + 1.
/// Throws Error when kappa < 0.
SocConstraint quadratic_to_soc(const CVec& row, double kappa, const AffineForm& rhs, int offset);

/// One term |row^T z|^2 where z sits at `offset` of the realified vector.
struct QuadraticTerm {
  CVec row;
  int offset = 0;
};

/// First-order expansion of sum_k |row_k^T z|^2 at x_prev:
/// sum_k 2 Re{conj(c_k) row_k^T z} - |c_k|^2 with c_k = row_k^T z_prev.
/// Tangent at x_prev and a global minorant.
AffineForm quadratic_minorant(const std::vector<QuadraticTerm>& terms, const RVec& x_prev);

/// sum_k |row_k^T z|^2 evaluated at x.
double quadratic_value(const std::vector<QuadraticTerm>& terms, const RVec& x);

// ---------------------------------------------------------------------------
// Text dump used by the regression fixtures.

void dump_program(const ConeProgram& program, std::ostream& out);
ConeProgram load_program(std::istream& in);

}  // namespace risnoma
