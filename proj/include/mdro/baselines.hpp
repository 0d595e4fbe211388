#pragma once

#include "mdro/wc_solver.hpp"

namespace mdro {

struct RowWassersteinOracleProblem {
  Matrix C;
  Matrix P_prime;
  double radius = 0.0;  // ground cost between states j,k is |j-k|

  int d() const { return static_cast<int>(C.rows()); }
};

// <loss, row marginals of theta_hat>; the nominal (non-robust) value.
double saa_value(const LossVector& loss, const DoubletMatrix& theta_hat);

// max_p <loss, p> s.t. D(pi_hat || p) <= r, via the single-row specialization
// of the entropy oracle dual.
double kl_dro_value(const LossVector& loss, const StationaryDistribution& pi_hat, double r);

// W1 between distributions on ordered states with cost |j-k| (cumulative-sum
// identity).
double w1_distance(const Vector& p, const Vector& q);

// max_p <c, p> s.t. W1(p_row, p) <= r, solved exactly as a transportation LP
// in the plan variables.
Vector w1_row_max(const Vector& c, const Vector& p_row, double r);

// Row-decomposed oracle: maximizes tr(C^T S) over row-wise W1 balls.
Matrix wasserstein_row_oracle(const RowWassersteinOracleProblem& problem);

class WassersteinOracle : public LinearOracle {
 public:
  Matrix solve(const Matrix& grad, const Vector& pi_prime, const Matrix& P_prime,
               double radius) override;
  double distance(const Vector& pi_prime, const Matrix& P_prime, const Matrix& S) const override;
};

// Shared Frank-Wolfe loop with the Wasserstein row oracle plugged in.
WorstCaseSolution wasserstein_dro_value(const LossVector& loss, const DoubletMatrix& theta_hat,
                                        double r, const FWConfig& cfg = {});

// Single entry point over all ambiguity kinds (cre | kl | wass); raw
// estimates are positivized first.
WorstCaseSolution worst_case_dispatch(const LossVector& loss, const DoubletMatrix& theta_raw,
                                      const AmbiguitySpec& spec, const FWConfig& cfg = {});

}  // namespace mdro
