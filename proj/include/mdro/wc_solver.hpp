#pragma once

#include "mdro/common.hpp"
#include "mdro/markov.hpp"
#include "mdro/oracle.hpp"

#include <memory>
#include <vector>

namespace mdro {

using LossVector = Vector;

enum class DivergenceKind { ConditionalRelativeEntropy, KLStationary, WassersteinRows };

struct AmbiguitySpec {
  double radius = 0.0;
  DivergenceKind kind = DivergenceKind::ConditionalRelativeEntropy;
};

struct FWConfig {
  double gap_tol = 1e-4;
  int max_iters = 10000;
  double line_search_tol = 1e-8;
  SGDConfig oracle;
};

struct FWTraceEntry {
  double objective = 0.0;
  double gap = 0.0;
  double step = 0.0;
};

struct WorstCaseSolution {
  double value = 0.0;
  TransitionMatrix P_star;
  double final_gap = 0.0;
  int iterations = 0;
  std::vector<FWTraceEntry> trace;
  bool converged = false;
};

// Reparametrized objective: <loss, pi(P)> via one linear solve against the
// stationarity system.
double psi(const LossVector& loss, const TransitionMatrix& P);

// Closed-form gradient via forward and adjoint solves:
//   A pi = e_d,  A^T u = loss,  dPsi/dP_ij = -u_j pi_i (j < d), 0 (j = d).
Matrix grad_psi(const LossVector& loss, const TransitionMatrix& P);

// Step maximizing Psi along P + gamma (S - P), gamma in [0,1]. Coarse 16-point
// scan seeds a golden-section refinement; falls back to gamma = 0 if no
// ascent is found.
double line_search(const LossVector& loss, const Matrix& P, const Matrix& S, double tol = 1e-8);

// Direction-finding oracle seam: maximizes <grad, S> over the ambiguity set
// around (pi_prime, P_prime) with the given radius.
class LinearOracle {
 public:
  virtual ~LinearOracle() = default;
  virtual Matrix solve(const Matrix& grad, const Vector& pi_prime, const Matrix& P_prime,
                       double radius) = 0;
  // divergence of S from the center, for feasibility checks
  virtual double distance(const Vector& pi_prime, const Matrix& P_prime,
                          const Matrix& S) const = 0;
};

class EntropyOracle : public LinearOracle {
 public:
  explicit EntropyOracle(SGDConfig cfg = {}) : cfg_(cfg) {}
  Matrix solve(const Matrix& grad, const Vector& pi_prime, const Matrix& P_prime,
               double radius) override;
  double distance(const Vector& pi_prime, const Matrix& P_prime, const Matrix& S) const override;

 private:
  SGDConfig cfg_;
  double last_lambda_ = -1.0;  // warm start across Frank-Wolfe iterations
};

// Frank-Wolfe ascent over the convex reparametrized ambiguity set, starting
// from the center P_prime, with a pluggable direction-finding oracle.
WorstCaseSolution frank_wolfe_loop(const LossVector& loss, const Vector& pi_prime,
                                   const Matrix& P_prime, double radius, LinearOracle& oracle,
                                   const FWConfig& cfg);

// Worst-case expectation over the conditional-relative-entropy ambiguity set;
// requires a strictly positive theta_prime.
WorstCaseSolution frank_wolfe_worst_case(const LossVector& loss, const DoubletMatrix& theta_prime,
                                         const AmbiguitySpec& spec, const FWConfig& cfg = {});

// Full predictor pipeline: positivize the raw estimate, then solve. The
// infeasibility fallback branch is unreachable after positivization because
// the center itself is always feasible.
WorstCaseSolution predictor(const LossVector& loss, const DoubletMatrix& theta_prime_raw,
                            const AmbiguitySpec& spec, const FWConfig& cfg = {},
                            double positivize_delta = 1e-6);

}  // namespace mdro
