#pragma once

#include "mdro/common.hpp"

#include <utility>
#include <vector>

namespace mdro {

// Joint stationary pmf of consecutive states (xi_t, xi_{t+1}). Entries are
// nonnegative and sum to one. States are 0-based internally; external formats
// are 1-based and converted at the boundary.
struct DoubletMatrix {
  Matrix entries;

  int d() const { return static_cast<int>(entries.rows()); }
  bool is_balanced(double tol = 1e-12) const;
  bool is_strictly_positive() const;
  void validate(double tol = 1e-12) const;
};

struct TransitionMatrix {
  Matrix entries;  // rows are conditional distributions

  int d() const { return static_cast<int>(entries.rows()); }
  void validate(double tol = 1e-12) const;
};

struct StationaryDistribution {
  Vector probabilities;

  int d() const { return static_cast<int>(probabilities.size()); }
};

struct Trajectory {
  int d = 0;
  int initial_state = 0;       // xi_0
  std::vector<int> states;     // xi_1 .. xi_T

  int T() const { return static_cast<int>(states.size()); }
};

// pi_i = sum_j theta_ij, P_ij = theta_ij / pi_i. Throws ZeroRowMarginal if a
// state is never visited.
std::pair<StationaryDistribution, TransitionMatrix> doublet_to_chain(const DoubletMatrix& theta);

// The linear system whose last-column inverse gives the stationary
// distribution: first d-1 rows of P^T - I, last row all ones.
Matrix stationarity_system(const Matrix& P);

// Solves A_d(P) pi = e_d by dense LU with partial pivoting.
StationaryDistribution stationary_from_transition(const TransitionMatrix& P);

Trajectory simulate(const TransitionMatrix& P, int xi0, int T, std::mt19937_64& rng);

// Empirical doublet distribution: transition counts over T steps divided by T.
DoubletMatrix estimate_doublet(const Trajectory& traj);

// Adds an artificial ghost transition from xi_T back to the start state and
// renormalizes by T+1.
// The result has balanced marginals and lies within conditional relative
// entropy d/T of the plain estimate.
DoubletMatrix ghost_balance(const DoubletMatrix& theta_hat, const Trajectory& traj);

// (theta + delta * J) / (1 + delta * d^2); strictly positive for delta > 0.
DoubletMatrix make_positive(const DoubletMatrix& theta_prime, double delta = 1e-6);

// D_c(theta' || theta). Conventions: 0 log(0/q) = 0; p log(p/0) = +inf for
// p > 0. Returns +inf (not an error) on support violations.
double conditional_relative_entropy(const DoubletMatrix& theta_prime, const DoubletMatrix& theta);

// Same divergence expressed through a stationary distribution and transition
// matrices: sum_i pi'_i D(P'_{i.} || P_{i.}).
double cond_entropy_vs_transition(const StationaryDistribution& pi_prime,
                                  const TransitionMatrix& P_prime, const TransitionMatrix& P);

// Row-wise weighted KL used by the reparametrized ambiguity set:
// sum_i alpha_i D(Pp_{i.} || S_{i.}).
double weighted_row_entropy(const Vector& alpha, const Matrix& P_prime, const Matrix& S);

}  // namespace mdro
