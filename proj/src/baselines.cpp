#include "mdro/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mdro {

namespace {

// Dense tableau simplex (maximization, equality constraints, x >= 0) started
// from a caller-supplied basis whose columns already form an identity in the
// tableau. Bland's rule, so cycling cannot occur.
class Simplex {
 public:
  Simplex(Matrix A, Vector b, Vector c, std::vector<int> basis)
      : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)), basis_(std::move(basis)) {}

  Vector solve() {
    const int m = static_cast<int>(A_.rows());
    const int n = static_cast<int>(A_.cols());
    constexpr double kTol = 1e-11;
    for (int iter = 0; iter < 10000; ++iter) {
      Vector cb(m);
      for (int i = 0; i < m; ++i) cb(i) = c_(basis_[i]);
      // reduced costs c_j - cb^T A_j; entering = smallest index with positive
      int enter = -1;
      for (int j = 0; j < n && enter < 0; ++j) {
        const double rc = c_(j) - cb.dot(A_.col(j));
        if (rc > kTol) enter = j;
      }
      if (enter < 0) {
        Vector x = Vector::Zero(n);
        for (int i = 0; i < m; ++i) x(basis_[i]) = b_(i);
        return x;
      }
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (A_(i, enter) > kTol) {
          const double ratio = b_(i) / A_(i, enter);
          if (leave < 0 || ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol && basis_[i] < basis_[leave]))
            leave = i, best_ratio = ratio;
        }
      }
      if (leave < 0) throw LPFailure("unbounded transportation subproblem");
      pivot(leave, enter);
      basis_[leave] = enter;
    }
    throw LPFailure("simplex iteration limit reached");
  }

 private:
  void pivot(int row, int col) {
    const double p = A_(row, col);
    A_.row(row) /= p;
    b_(row) /= p;
    for (int i = 0; i < A_.rows(); ++i) {
      if (i == row) continue;
      const double f = A_(i, col);
      if (f == 0.0) continue;
      A_.row(i) -= f * A_.row(row);
      b_(i) -= f * b_(row);
    }
  }

  Matrix A_;
  Vector b_;
  Vector c_;
  std::vector<int> basis_;
};

}  // namespace

double saa_value(const LossVector& loss, const DoubletMatrix& theta_hat) {
  if (loss.size() != theta_hat.d()) throw InvalidInput("loss dimension mismatch");
  return loss.dot(theta_hat.entries.rowwise().sum());
}

double kl_dro_value(const LossVector& loss, const StationaryDistribution& pi_hat, double r) {
  Vector p = kl_row_maximizer(loss, pi_hat.probabilities, r);
  return loss.dot(p);
}

double w1_distance(const Vector& p, const Vector& q) {
  const int d = static_cast<int>(p.size());
  double dist = 0.0, cum = 0.0;
  for (int j = 0; j + 1 < d; ++j) {
    cum += p(j) - q(j);
    dist += std::abs(cum);
  }
  return dist;
}

Vector w1_row_max(const Vector& c, const Vector& p_row, double r) {
  const int d = static_cast<int>(c.size());
  if (r < 0.0) throw InvalidInput("Wasserstein radius must be >= 0");
  if (r == 0.0) return p_row;
  // plan variables gamma_jk (source j, target k) plus a slack on the budget
  const int n = d * d + 1;
  const int m = d + 1;
  Matrix A = Matrix::Zero(m, n);
  Vector b(m), cost = Vector::Zero(n);
  for (int j = 0; j < d; ++j) {
    b(j) = p_row(j);
    for (int k = 0; k < d; ++k) {
      const int col = j * d + k;
      A(j, col) = 1.0;
      A(d, col) = std::abs(j - k);
      cost(col) = c(k);
    }
  }
  A(d, d * d) = 1.0;  // slack
  b(d) = r;
  std::vector<int> basis(m);
  for (int j = 0; j < d; ++j) basis[j] = j * d + j;  // identity plan
  basis[d] = d * d;
  Vector plan = Simplex(std::move(A), std::move(b), std::move(cost), std::move(basis)).solve();
  Vector p = Vector::Zero(d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) p(k) += plan(j * d + k);
  return p;
}

Matrix wasserstein_row_oracle(const RowWassersteinOracleProblem& problem) {
  const int d = problem.d();
  Matrix S(d, d);
  for (int i = 0; i < d; ++i)
    S.row(i) = w1_row_max(problem.C.row(i), problem.P_prime.row(i), problem.radius);
  return S;
}

Matrix WassersteinOracle::solve(const Matrix& grad, const Vector& /*pi_prime*/,
                                const Matrix& P_prime, double radius) {
  return wasserstein_row_oracle({grad, P_prime, radius});
}

double WassersteinOracle::distance(const Vector& /*pi_prime*/, const Matrix& P_prime,
                                   const Matrix& S) const {
  double worst = 0.0;
  for (int i = 0; i < P_prime.rows(); ++i)
    worst = std::max(worst, w1_distance(P_prime.row(i), S.row(i)));
  return worst;
}

WorstCaseSolution wasserstein_dro_value(const LossVector& loss, const DoubletMatrix& theta_hat,
                                        double r, const FWConfig& cfg) {
  if (!theta_hat.is_strictly_positive())
    throw InvalidInput("theta_hat must be strictly positive (apply make_positive first)");
  auto [pi, P] = doublet_to_chain(theta_hat);
  WassersteinOracle oracle;
  return frank_wolfe_loop(loss, pi.probabilities, P.entries, r, oracle, cfg);
}

WorstCaseSolution worst_case_dispatch(const LossVector& loss, const DoubletMatrix& theta_raw,
                                      const AmbiguitySpec& spec, const FWConfig& cfg) {
  DoubletMatrix theta =
      theta_raw.is_strictly_positive() ? theta_raw : make_positive(theta_raw);
  switch (spec.kind) {
    case DivergenceKind::ConditionalRelativeEntropy:
      return frank_wolfe_worst_case(loss, theta, spec, cfg);
    case DivergenceKind::WassersteinRows:
      return wasserstein_dro_value(loss, theta, spec.radius, cfg);
    case DivergenceKind::KLStationary: {
      auto [pi, P] = doublet_to_chain(theta);
      WorstCaseSolution out;
      out.value = kl_dro_value(loss, pi, spec.radius);
      out.P_star = P;
      out.converged = true;
      out.iterations = 0;
      return out;
    }
  }
  throw InvalidInput("unknown divergence kind");
}

}  // namespace mdro
