#pragma once

#include "mdro/common.hpp"

namespace mdro {

// Linearized direction-finding subproblem:
//   max_S tr(C^T S)  s.t.  S row-stochastic,
//                          sum_i alpha_i D(P'_{i.} || S_{i.}) <= r.
struct OracleProblem {
  Matrix C;        // gradient of the objective at the anchor
  Vector alpha;    // stationary weights of the center model
  Matrix P_prime;  // center transition matrix, strictly positive
  double radius = 0.0;

  int d() const { return static_cast<int>(C.rows()); }
  void validate() const;
};

struct DualBox {
  Vector lower;  // lower_i = max_j C_ij
  Vector upper;
};

enum class SGDMode { FullGradient, PerCoordinate };

// The exact derivative of the partially minimized dual differentiates through
// lambda*(eta); the printed variant drops that factor and scales by d. Both
// are available for comparison; Exact is the default.
enum class DualDerivative { Exact, Printed };

struct SGDConfig {
  int iters = 10000;          // N
  double step_constant = 1.0; // K; learning rate is K * N^{-1/2}
  SGDMode mode = SGDMode::FullGradient;
  DualDerivative derivative = DualDerivative::Exact;
  bool polish = true;         // refine to machine precision after SGD
  double gap_tol = 1e-6;      // duality-gap stopping threshold
};

struct OracleSolution {
  Matrix S;
  Vector eta_star;
  double lambda_star = 0.0;
  double dual_value = 0.0;
  double primal_value = 0.0;
  bool converged = false;
};

// Bounds of Proposition-style box containing every dual optimum.
DualBox dual_bounds(const OracleProblem& problem);

// Unique minimizer over lambda >= 0 of the dual objective at fixed eta.
// Requires eta_i > max_j C_ij strictly.
double oracle_lambda_star(const Vector& eta, const OracleProblem& problem);

// Partially minimized dual Q(eta) = sum_i eta_i - lambda*(eta); convex.
double oracle_dual_objective(const Vector& eta, const OracleProblem& problem);

Vector oracle_dual_gradient(const Vector& eta, const OracleProblem& problem,
                            DualDerivative variant = DualDerivative::Exact);

// Primal recovery S_ij = lambda alpha_i P'_ij / (eta_i - C_ij).
Matrix recover_primal(const Vector& eta, double lambda, const OracleProblem& problem);

// Projected gradient descent on Q over the dual box, optionally followed by
// an exact polish (per-row Newton solves coupled through a one-dimensional
// search over the entropy multiplier). lambda_hint, when positive, narrows
// the polish bracket (useful across consecutive Frank-Wolfe iterations).
OracleSolution solve_dual(const OracleProblem& problem, const SGDConfig& cfg = {},
                          double lambda_hint = -1.0);

// Single-row member of the same dual family: argmax_p <c, p> over the simplex
// subject to D(center || p) <= r, for a strictly positive center.
Vector kl_row_maximizer(const Vector& c, const Vector& center, double r);

}  // namespace mdro
