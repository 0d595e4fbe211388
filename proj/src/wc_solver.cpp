#include "mdro/wc_solver.hpp"

#include <algorithm>
#include <cmath>

namespace mdro {

namespace {

struct PsiSolver {
  Eigen::PartialPivLU<Matrix> lu;
  int d;

  explicit PsiSolver(const Matrix& P) : lu(stationarity_system(P)), d(static_cast<int>(P.rows())) {}

  Vector stationary() const {
    Vector rhs = Vector::Zero(d);
    rhs(d - 1) = 1.0;
    return lu.solve(rhs);
  }
};

double psi_raw(const LossVector& loss, const Matrix& P) {
  PsiSolver solver(P);
  Vector pi = solver.stationary();
  if (!pi.allFinite()) throw SingularSystem("stationarity system is singular");
  return loss.dot(pi);
}

}  // namespace

double psi(const LossVector& loss, const TransitionMatrix& P) {
  if (loss.size() != P.d()) throw InvalidInput("loss dimension mismatch");
  return psi_raw(loss, P.entries);
}

Matrix grad_psi(const LossVector& loss, const TransitionMatrix& P) {
  if (loss.size() != P.d()) throw InvalidInput("loss dimension mismatch");
  const int d = P.d();
  Matrix A = stationarity_system(P.entries);
  Eigen::PartialPivLU<Matrix> lu(A);
  Vector rhs = Vector::Zero(d);
  rhs(d - 1) = 1.0;
  Vector pi = lu.solve(rhs);
  Vector u = A.transpose().partialPivLu().solve(loss);
  if (!pi.allFinite() || !u.allFinite()) throw SingularSystem("stationarity system is singular");
  Matrix G = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d - 1; ++j) G(i, j) = -u(j) * pi(i);
  return G;
}

double line_search(const LossVector& loss, const Matrix& P, const Matrix& S, double tol) {
  const Matrix D = S - P;
  if (D.cwiseAbs().maxCoeff() < 1e-15) return 0.0;
  auto value = [&](double g) { return psi_raw(loss, P + g * D); };
  const double f0 = value(0.0);

  // coarse scan to pick a bracket (Psi along the segment is smooth but not
  // necessarily unimodal)
  const int kScan = 16;
  double best_g = 0.0, best_f = f0;
  for (int k = 1; k <= kScan; ++k) {
    const double g = static_cast<double>(k) / kScan;
    const double f = value(g);
    if (f > best_f) {
      best_f = f;
      best_g = g;
    }
  }
  double lo = std::max(0.0, best_g - 1.0 / kScan);
  double hi = std::min(1.0, best_g + 1.0 / kScan);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = value(x1), f2 = value(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = value(x1);
    }
  }
  const double g = 0.5 * (a + b);
  if (value(g) <= f0) return best_f > f0 ? best_g : 0.0;
  return g;
}

Matrix EntropyOracle::solve(const Matrix& grad, const Vector& pi_prime, const Matrix& P_prime,
                            double radius) {
  OracleProblem pb{grad, pi_prime, P_prime, radius};
  OracleSolution sol = solve_dual(pb, cfg_, last_lambda_);
  last_lambda_ = sol.lambda_star;
  return sol.S;
}

double EntropyOracle::distance(const Vector& pi_prime, const Matrix& P_prime,
                               const Matrix& S) const {
  return weighted_row_entropy(pi_prime, P_prime, S);
}

WorstCaseSolution frank_wolfe_loop(const LossVector& loss, const Vector& pi_prime,
                                   const Matrix& P_prime, double radius, LinearOracle& oracle,
                                   const FWConfig& cfg) {
  WorstCaseSolution out;
  Matrix P = P_prime;  // the center is always strictly feasible
  double f = psi_raw(loss, P);
  out.trace.reserve(64);
  for (int m = 0; m < cfg.max_iters; ++m) {
    const Matrix G = grad_psi(loss, TransitionMatrix{P});
    const Matrix S = oracle.solve(G, pi_prime, P_prime, radius);
    const double gap = ((S - P).array() * G.array()).sum();
    out.final_gap = gap;
    out.iterations = m + 1;
    if (gap <= cfg.gap_tol) {
      out.trace.push_back({f, gap, 0.0});
      out.converged = true;
      break;
    }
    const double gamma = line_search(loss, P, S, cfg.line_search_tol);
    P += gamma * (S - P);
    const double f_new = psi_raw(loss, P);
    out.trace.push_back({f_new, gap, gamma});
    f = std::max(f, f_new);  // exact-type line search never accepts descent
  }
  out.value = f;
  out.P_star = TransitionMatrix{std::move(P)};
  return out;
}

WorstCaseSolution frank_wolfe_worst_case(const LossVector& loss, const DoubletMatrix& theta_prime,
                                         const AmbiguitySpec& spec, const FWConfig& cfg) {
  if (spec.kind != DivergenceKind::ConditionalRelativeEntropy)
    throw InvalidInput("frank_wolfe_worst_case handles the conditional-relative-entropy kind");
  if (spec.radius <= 0.0) throw InvalidInput("ambiguity radius must be positive");
  if (!theta_prime.is_strictly_positive())
    throw InvalidInput("theta_prime must be strictly positive (apply make_positive first)");
  auto [pi, P] = doublet_to_chain(theta_prime);
  EntropyOracle oracle(cfg.oracle);
  return frank_wolfe_loop(loss, pi.probabilities, P.entries, spec.radius, oracle, cfg);
}

WorstCaseSolution predictor(const LossVector& loss, const DoubletMatrix& theta_prime_raw,
                            const AmbiguitySpec& spec, const FWConfig& cfg,
                            double positivize_delta) {
  DoubletMatrix theta = theta_prime_raw.is_strictly_positive()
                            ? theta_prime_raw
                            : make_positive(theta_prime_raw, positivize_delta);
  return frank_wolfe_worst_case(loss, theta, spec, cfg);
}

}  // namespace mdro
