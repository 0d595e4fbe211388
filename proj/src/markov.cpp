#include "mdro/markov.hpp"

#include <cmath>
#include <limits>

namespace mdro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool DoubletMatrix::is_balanced(double tol) const {
  Vector row = entries.rowwise().sum();
  Vector col = entries.colwise().sum().transpose();
  return (row - col).cwiseAbs().maxCoeff() <= tol;
}

bool DoubletMatrix::is_strictly_positive() const { return entries.minCoeff() > 0.0; }

void DoubletMatrix::validate(double tol) const {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw InvalidInput("doublet matrix must be square");
  if (entries.minCoeff() < -tol) throw InvalidInput("doublet matrix has negative entries");
  if (std::abs(entries.sum() - 1.0) > tol) throw InvalidInput("doublet matrix must sum to 1");
}

void TransitionMatrix::validate(double tol) const {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw InvalidInput("transition matrix must be square");
  if (entries.minCoeff() < -tol) throw InvalidInput("transition matrix has negative entries");
  Vector rs = entries.rowwise().sum();
  if ((rs.array() - 1.0).abs().maxCoeff() > tol)
    throw InvalidInput("transition matrix rows must sum to 1");
}

std::pair<StationaryDistribution, TransitionMatrix> doublet_to_chain(const DoubletMatrix& theta) {
  const int d = theta.d();
  Vector pi = theta.entries.rowwise().sum();
  for (int i = 0; i < d; ++i)
    if (pi(i) <= 0.0) throw ZeroRowMarginal("state " + std::to_string(i + 1) + " never visited");
  Matrix P = theta.entries.array().colwise() / pi.array();
  return {StationaryDistribution{std::move(pi)}, TransitionMatrix{std::move(P)}};
}

Matrix stationarity_system(const Matrix& P) {
  const int d = static_cast<int>(P.rows());
  Matrix A = P.transpose() - Matrix::Identity(d, d);
  A.row(d - 1).setOnes();
  return A;
}

StationaryDistribution stationary_from_transition(const TransitionMatrix& P) {
  const int d = P.d();
  Matrix A = stationarity_system(P.entries);
  Eigen::PartialPivLU<Matrix> lu(A);
  Vector rhs = Vector::Zero(d);
  rhs(d - 1) = 1.0;
  Vector pi = lu.solve(rhs);
  if (!pi.allFinite() || (A * pi - rhs).cwiseAbs().maxCoeff() > 1e-8)
    throw SingularSystem("stationarity system is singular; chain not ergodic");
  return StationaryDistribution{std::move(pi)};
}

Trajectory simulate(const TransitionMatrix& P, int xi0, int T, std::mt19937_64& rng) {
  const int d = P.d();
  if (xi0 < 0 || xi0 >= d) throw InvalidInput("initial state out of range");
  if (T < 1) throw InvalidInput("T must be >= 1");
  Trajectory traj;
  traj.d = d;
  traj.initial_state = xi0;
  traj.states.reserve(T);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int s = xi0;
  for (int t = 0; t < T; ++t) {
    const double u = unif(rng);
    double acc = 0.0;
    int next = d - 1;
    for (int j = 0; j < d; ++j) {
      acc += P.entries(s, j);
      if (u < acc) {
        next = j;
        break;
      }
    }
    traj.states.push_back(next);
    s = next;
  }
  return traj;
}

DoubletMatrix estimate_doublet(const Trajectory& traj) {
  const int d = traj.d;
  if (traj.T() < 1) throw InvalidInput("trajectory must have length >= 1");
  Matrix counts = Matrix::Zero(d, d);
  int prev = traj.initial_state;
  for (int s : traj.states) {
    counts(prev, s) += 1.0;
    prev = s;
  }
  return DoubletMatrix{counts / static_cast<double>(traj.T())};
}

DoubletMatrix ghost_balance(const DoubletMatrix& theta_hat, const Trajectory& traj) {
  const int T = traj.T();
  Matrix counts = Matrix::Zero(traj.d, traj.d);
  int prev = traj.initial_state;
  for (int s : traj.states) {
    counts(prev, s) += 1.0;
    prev = s;
  }
  if ((counts / static_cast<double>(T) - theta_hat.entries).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidInput("theta_hat does not match the trajectory");
  // Closing the loop back to the start state is what balances the marginals:
  // along the path, in-count minus out-count of state i is 1{xi_T=i}-1{xi_0=i}.
  counts(traj.states.back(), traj.initial_state) += 1.0;
  return DoubletMatrix{counts / static_cast<double>(T + 1)};
}

DoubletMatrix make_positive(const DoubletMatrix& theta_prime, double delta) {
  const int d = theta_prime.d();
  if (delta == 0.0) return theta_prime;
  if (delta < 0.0) throw InvalidInput("perturbation weight must be >= 0");
  Matrix out =
      (theta_prime.entries.array() + delta) / (1.0 + delta * static_cast<double>(d) * d);
  return DoubletMatrix{std::move(out)};
}

double conditional_relative_entropy(const DoubletMatrix& theta_prime, const DoubletMatrix& theta) {
  const int d = theta_prime.d();
  if (theta.d() != d) throw InvalidInput("dimension mismatch");
  Vector rp = theta_prime.entries.rowwise().sum();
  Vector r = theta.entries.rowwise().sum();
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    if (rp(i) <= 0.0) continue;  // row carries no mass
    for (int j = 0; j < d; ++j) {
      const double p = theta_prime.entries(i, j);
      if (p <= 0.0) continue;
      const double q = theta.entries(i, j);
      if (q <= 0.0 || r(i) <= 0.0) return kInf;
      total += p * (std::log(p / rp(i)) - std::log(q / r(i)));
    }
  }
  return total;
}

double cond_entropy_vs_transition(const StationaryDistribution& pi_prime,
                                  const TransitionMatrix& P_prime, const TransitionMatrix& P) {
  const int d = P_prime.d();
  if (P.d() != d || pi_prime.d() != d) throw InvalidInput("dimension mismatch");
  return weighted_row_entropy(pi_prime.probabilities, P_prime.entries, P.entries);
}

double weighted_row_entropy(const Vector& alpha, const Matrix& P_prime, const Matrix& S) {
  const int d = static_cast<int>(P_prime.rows());
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    if (alpha(i) <= 0.0) continue;
    for (int j = 0; j < d; ++j) {
      const double p = P_prime(i, j);
      if (p <= 0.0) continue;
      const double q = S(i, j);
      if (q <= 0.0) return kInf;
      total += alpha(i) * p * std::log(p / q);
    }
  }
  return total;
}

}  // namespace mdro
