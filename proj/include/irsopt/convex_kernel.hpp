#ifndef IRSOPT_CONVEX_KERNEL_HPP_
#define IRSOPT_CONVEX_KERNEL_HPP_

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "irsopt/types.hpp"

namespace irsopt::convex {

/// Concave objective oracle. `grad` and `hess` may be null when not needed.
/// Returning a non-finite value marks x as outside the objective's domain.
using Objective = std::function<double(const RVector& x, RVector* grad, RMatrix* hess)>;

struct BarrierOptions {
  double tol = 1e-8;      // target duality gap, relative to max(1, |f|)
  double t0 = 1.0;        // initial barrier weight on the objective
  double mu = 50.0;        // weight growth per outer step
  int max_newton = 200;   // total Newton steps before MaxIterations
  double center_tol = 1e-10;  // Newton decrement^2 / 2 that ends a centering pass
};

struct SolveResult {
  RVector x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int newton_steps = 0;
  std::vector<double> path_objective;  // objective after each centering pass
  bool stopped_early = false;
};

/// One nonzero of dZ/dx_p for a Hermitian-valued affine map.
struct HermitianEntry {
  int row;
  int col;
  cdouble coef;
};
using HermitianDirection = std::vector<HermitianEntry>;

/// Z(x) = Z0 + sum_p x_p B_p with Hermitian Z0 and Hermitian directions B_p.
/// The constraint is Z(x) > 0; positive definiteness, log det and the inverse are
/// evaluated on the real representation [[Re Z, -Im Z], [Im Z, Re Z]].
struct LmiBlock {
  CMatrix Z0;
  std::vector<HermitianDirection> directions;  // one per variable, may be empty

  CMatrix at(const RVector& x) const;
};

/// Generic log-barrier problem: maximize f(x) s.t. A x <= b and every LMI block PD.
struct BarrierProblem {
  int n = 0;
  Objective objective;  // null means f = 0
  RMatrix A;
  RVector b;
  std::vector<LmiBlock> lmis;
  RVector x0;
  std::function<bool(const RVector&)> early_stop;
};

/// Path-following barrier method with damped/backtracking Newton centering.
/// Throws NotStrictlyFeasible when x0 is not interior, MaxIterations past the Newton budget.
SolveResult barrier_solve(const BarrierProblem& problem, const BarrierOptions& options = {});

// ---- smooth concave objective over a polytope ------------------------------------

struct SmoothConcaveProblem {
  int n = 0;
  Objective objective;
  RMatrix A;  // A x <= b, may have zero rows
  RVector b;
  RVector lower;  // entries may be -inf
  RVector upper;  // entries may be +inf
  RVector x0;     // strictly feasible
};

SolveResult solve_concave_affine(const SmoothConcaveProblem& problem, double tol = 1e-8);

/// Phase I: maximize the smallest normalized slack of A x <= b, lower <= x <= upper.
/// Returns a strictly feasible point, or nullopt when the interior is empty.
/// The box must be finite.
std::optional<RVector> find_interior_point(const RMatrix& A, const RVector& b, const RVector& lower,
                                           const RVector& upper);

// ---- lifted phase problem ----------------------------------------------------------

/// weight * log2(Re Tr(W A) + offset), weight >= 0.
struct TraceLogTerm {
  CMatrix A;
  double offset = 0.0;
  double weight = 1.0;
};

/// Re Tr(W A) >= rhs.
struct TraceInequality {
  CMatrix A;
  double rhs = 0.0;
};

/// maximize sum log terms + Re Tr(W L) over Hermitian W with unit diagonal and an
/// auxiliary vector wbar, subject to trace inequalities, W > 0 and
/// [[W, wbar], [wbar^H, 1]] > 0.
struct PSDConcaveProblem {
  int order = 0;
  std::vector<TraceLogTerm> log_terms;
  CMatrix linear;  // empty means zero
  std::vector<TraceInequality> inequalities;
  CMatrix W0;  // strictly feasible start
  CVector wbar0;
};

struct PSDSolution {
  CMatrix W;
  CVector wbar;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int newton_steps = 0;
  std::vector<double> path_objective;
};

PSDSolution solve_psd_concave(const PSDConcaveProblem& problem, double tol = 1e-6,
                              const BarrierOptions& options = {});

/// Strictly feasible (W, wbar) for the constraint set of a PSDConcaveProblem, or nullopt.
std::optional<std::pair<CMatrix, CVector>> psd_interior_point(int order,
                                                              const std::vector<TraceInequality>& inequalities);

/// Objective value of a PSDConcaveProblem at W (ignores constraints).
double psd_objective(const PSDConcaveProblem& problem, const CMatrix& W);

// ---- realification helpers -----------------------------------------------------------

/// [[Re H, -Im H], [Im H, Re H]]. For Hermitian H the result is symmetric,
/// Tr(realify(A) realify(B)) = 2 Re Tr(A B) and log det realify(H) = 2 log det H.
RMatrix realify(const CMatrix& H);
CMatrix complexify(const RMatrix& R);

/// Number of real parameters for order-N (W, wbar): N(N-1) + 2N.
int lifted_dimension(int order);
RVector pack_lifted(const CMatrix& W, const CVector& wbar);
std::pair<CMatrix, CVector> unpack_lifted(int order, const RVector& x);

}  // namespace irsopt::convex

#endif  // IRSOPT_CONVEX_KERNEL_HPP_
