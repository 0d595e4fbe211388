#include "mdro/oracle.hpp"

#include "mdro/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double trace_product(const Matrix& C, const Matrix& P) { return (C.array() * P.array()).sum(); }

// Scale used for "is this row effectively constant" decisions.
double matrix_scale(const Matrix& C) { return std::max(1.0, C.cwiseAbs().maxCoeff()); }

// Solves sum_j lambda * alpha_i * P'_ij / (eta - C_ij) = 1 for eta on
// (max_j C_ij, inf). Works on the gap t = eta - max_j C_ij so that tiny
// multipliers (huge radii) do not cancel against max_j C_ij; the row sum is
// strictly decreasing in t, and [lambda*alpha*P'_{ij*}, lambda*alpha]
// brackets the root.
double solve_row_gap(const Vector& c_row, const Vector& p_row, double lam_alpha) {
  const int d = static_cast<int>(c_row.size());
  int jstar = 0;
  c_row.maxCoeff(&jstar);
  const double M = c_row(jstar);
  double lo = lam_alpha * p_row(jstar);
  double hi = lam_alpha;
  double t = std::sqrt(lo * hi);
  for (int it = 0; it < 100; ++it) {
    double s = 0.0, ds = 0.0;
    for (int j = 0; j < d; ++j) {
      const double inv = 1.0 / (t + (M - c_row(j)));
      s += lam_alpha * p_row(j) * inv;
      ds -= lam_alpha * p_row(j) * inv * inv;
    }
    if (std::abs(s - 1.0) < 1e-15) break;
    if (s > 1.0)
      lo = std::max(lo, t);
    else
      hi = std::min(hi, t);
    double next = t - (s - 1.0) / ds;  // Newton, bisection fallback
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (std::abs(next - t) < 1e-16 * t) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

struct RowSolveResult {
  Vector eta;
  Vector gap;  // eta_i - max_j C_ij, kept separately for precision
  Matrix S;
  double entropy;
};

// lambda*(eta) and Q(eta) evaluated from the per-row gaps, immune to the
// cancellation eta_i - C_ij ~ 0 at vertex-like solutions.
double lambda_star_from_gaps(const Vector& gap, const OracleProblem& pb) {
  double expo = -pb.radius;
  for (int i = 0; i < pb.d(); ++i) {
    const double M = pb.C.row(i).maxCoeff();
    for (int j = 0; j < pb.d(); ++j)
      expo += pb.alpha(i) * pb.P_prime(i, j) *
              std::log((gap(i) + (M - pb.C(i, j))) / pb.alpha(i));
  }
  return std::exp(expo);
}

RowSolveResult solve_rows(double lambda, const OracleProblem& pb) {
  const int d = pb.d();
  RowSolveResult res;
  res.eta = Vector::Zero(d);
  res.gap = Vector::Zero(d);
  res.S = Matrix::Zero(d, d);
  const double scale = matrix_scale(pb.C);
  for (int i = 0; i < d; ++i) {
    const Vector c_row = pb.C.row(i);
    const Vector p_row = pb.P_prime.row(i);
    const double lam_alpha = lambda * pb.alpha(i);
    const double M = c_row.maxCoeff();
    const double range = M - c_row.minCoeff();
    if (range < 1e-14 * scale) {
      // constant gradient row: any distribution scores the same, keep P'
      res.eta(i) = M + lam_alpha;
      res.gap(i) = lam_alpha;
      res.S.row(i) = p_row;
      continue;
    }
    const double t = solve_row_gap(c_row, p_row, lam_alpha);
    res.eta(i) = M + t;
    res.gap(i) = t;
    for (int j = 0; j < d; ++j) res.S(i, j) = lam_alpha * p_row(j) / (t + (M - c_row(j)));
    res.S.row(i) /= res.S.row(i).sum();
  }
  res.entropy = weighted_row_entropy(pb.alpha, pb.P_prime, res.S);
  return res;
}

// Feasible primal value from a (possibly rough) dual iterate: recover S,
// renormalize rows, and if the entropy constraint is violated pull the matrix
// toward P' until it is satisfied (the constraint is convex and vanishes at P').
double feasible_primal_value(const Vector& eta, double lambda, const OracleProblem& pb) {
  const int d = pb.d();
  Matrix S(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double den = eta(i) - pb.C(i, j);
      S(i, j) = den > 0 ? lambda * pb.alpha(i) * pb.P_prime(i, j) / den : kInf;
    }
    const double rs = S.row(i).sum();
    if (!std::isfinite(rs) || rs <= 0) {
      S.row(i) = pb.P_prime.row(i);
      continue;
    }
    S.row(i) /= rs;
  }
  if (weighted_row_entropy(pb.alpha, pb.P_prime, S) <= pb.radius)
    return trace_product(pb.C, S);
  double tlo = 0.0, thi = 1.0;  // blend S_t = P' + t (S - P')
  for (int it = 0; it < 60; ++it) {
    const double t = 0.5 * (tlo + thi);
    Matrix St = pb.P_prime + t * (S - pb.P_prime);
    if (weighted_row_entropy(pb.alpha, pb.P_prime, St) <= pb.radius)
      tlo = t;
    else
      thi = t;
  }
  Matrix St = pb.P_prime + tlo * (S - pb.P_prime);
  return trace_product(pb.C, St);
}

OracleSolution exact_solve(const OracleProblem& pb, const SGDConfig& cfg, double lambda_hint) {
  const int d = pb.d();
  OracleSolution sol;
  const double scale = matrix_scale(pb.C);
  const double range = pb.C.maxCoeff() - pb.C.minCoeff();
  if (range < 1e-14 * scale) {
    // constant objective: every feasible S is optimal
    sol.S = pb.P_prime;
    sol.eta_star = pb.C.rowwise().maxCoeff();
    sol.lambda_star = 0.0;
    sol.primal_value = trace_product(pb.C, pb.P_prime);
    sol.dual_value = sol.primal_value;
    sol.converged = true;
    return sol;
  }

  // The entropy of the recovered primal decreases monotonically in the
  // multiplier lambda, from +inf (vertex solutions have zeros while P' > 0)
  // to 0 (S -> P'). Bisect on log lambda for entropy == r, approaching from
  // the feasible side.
  double lo = lambda_hint > 0 ? lambda_hint : scale;
  double hi = lo;
  RowSolveResult rs_lo = solve_rows(lo, pb);
  while (rs_lo.entropy <= pb.radius) {
    lo /= 8.0;
    if (lo < 1e-300) break;
    rs_lo = solve_rows(lo, pb);
  }
  RowSolveResult rs_hi = solve_rows(hi, pb);
  while (rs_hi.entropy > pb.radius) {
    hi *= 8.0;
    if (hi > 1e300) throw DomainViolation("entropy multiplier search diverged");
    rs_hi = solve_rows(hi, pb);
  }
  RowSolveResult best = rs_hi;  // feasible side
  double best_lambda = hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    RowSolveResult rs = solve_rows(mid, pb);
    if (rs.entropy > pb.radius) {
      lo = mid;
    } else {
      hi = mid;
      best = rs;
      best_lambda = mid;
    }
  }
  sol.S = best.S;
  sol.eta_star = best.eta;
  sol.lambda_star = best_lambda;
  sol.primal_value = trace_product(pb.C, sol.S);
  sol.dual_value = sol.eta_star.sum() - lambda_star_from_gaps(best.gap, pb);
  sol.converged = sol.dual_value - sol.primal_value <= std::max(cfg.gap_tol, 1e-9 * scale * d);
  return sol;
}

}  // namespace

void OracleProblem::validate() const {
  const int n = d();
  if (C.cols() != n || P_prime.rows() != n || P_prime.cols() != n || alpha.size() != n)
    throw InvalidInput("oracle problem dimension mismatch");
  if (radius <= 0.0) throw InvalidInput("oracle radius must be positive");
  if (P_prime.minCoeff() <= 0.0 || alpha.minCoeff() <= 0.0)
    throw InvalidInput("oracle center must be strictly positive");
}

DualBox dual_bounds(const OracleProblem& problem) {
  problem.validate();
  const int d = problem.d();
  Vector lower = problem.C.rowwise().maxCoeff();
  const double cmax = problem.C.maxCoeff();
  const double er = std::exp(-problem.radius);
  const double common = (d * cmax - er * trace_product(problem.C, problem.P_prime)) / (1.0 - er);
  const double lower_sum = lower.sum();
  Vector upper = Vector::Constant(d, common) - (Vector::Constant(d, lower_sum) - lower);
  const double tol = 1e-12 * matrix_scale(problem.C);
  if (!upper.allFinite() || ((upper - lower).array() < -tol).any())
    throw DegenerateBox("dual box is empty; radius too small for this gradient");
  return DualBox{std::move(lower), std::move(upper)};
}

double oracle_lambda_star(const Vector& eta, const OracleProblem& problem) {
  const int d = problem.d();
  double expo = -problem.radius;
  for (int i = 0; i < d; ++i) {
    const double slack_min = eta(i) - problem.C.row(i).maxCoeff();
    if (slack_min <= 0.0) throw DomainViolation("eta_i must exceed max_j C_ij");
    for (int j = 0; j < d; ++j)
      expo += problem.alpha(i) * problem.P_prime(i, j) *
              std::log((eta(i) - problem.C(i, j)) / problem.alpha(i));
  }
  return std::exp(expo);
}

double oracle_dual_objective(const Vector& eta, const OracleProblem& problem) {
  return eta.sum() - oracle_lambda_star(eta, problem);
}

Vector oracle_dual_gradient(const Vector& eta, const OracleProblem& problem,
                            DualDerivative variant) {
  const int d = problem.d();
  Vector grad(d);
  const double lam = variant == DualDerivative::Exact ? oracle_lambda_star(eta, problem) : 0.0;
  for (int i = 0; i < d; ++i) {
    double inv_sum = 0.0;
    for (int j = 0; j < d; ++j) inv_sum += problem.P_prime(i, j) / (eta(i) - problem.C(i, j));
    if (variant == DualDerivative::Exact)
      grad(i) = 1.0 - lam * problem.alpha(i) * inv_sum;
    else
      grad(i) = d - problem.alpha(i) * inv_sum;
  }
  return grad;
}

Matrix recover_primal(const Vector& eta, double lambda, const OracleProblem& problem) {
  const int d = problem.d();
  Matrix S(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      S(i, j) = lambda * problem.alpha(i) * problem.P_prime(i, j) / (eta(i) - problem.C(i, j));
  return S;
}

OracleSolution solve_dual(const OracleProblem& problem, const SGDConfig& cfg, double lambda_hint) {
  problem.validate();
  if (cfg.polish) return exact_solve(problem, cfg, lambda_hint);

  const int d = problem.d();
  const DualBox box = dual_bounds(problem);
  const Vector width = box.upper - box.lower;
  Vector eta = box.lower + 0.1 * width;
  // strict interiority for the log terms
  for (int i = 0; i < d; ++i)
    if (width(i) <= 0) eta(i) = box.lower(i) + 1e-12 * std::max(1.0, std::abs(box.lower(i)));

  const int N = std::max(1, cfg.iters);
  const double step = cfg.step_constant / std::sqrt(static_cast<double>(N));
  auto project = [&](Vector& v) {
    for (int i = 0; i < d; ++i) {
      const double floor_i = box.lower(i) + 1e-12 * std::max(width(i), 1e-9);
      v(i) = std::clamp(v(i), floor_i, std::max(box.upper(i), floor_i));
    }
  };
  bool early = false;
  for (int n = 0; n < N && !early; ++n) {
    if (cfg.mode == SGDMode::FullGradient) {
      eta -= step * oracle_dual_gradient(eta, problem, cfg.derivative);
      project(eta);
    } else {
      for (int i = 0; i < d; ++i) {
        const Vector g = oracle_dual_gradient(eta, problem, cfg.derivative);
        eta(i) -= step * g(i);
        project(eta);
      }
    }
    if ((n + 1) % 200 == 0) {
      const double lam = oracle_lambda_star(eta, problem);
      const double gap =
          oracle_dual_objective(eta, problem) - feasible_primal_value(eta, lam, problem);
      if (gap <= cfg.gap_tol) early = true;
    }
  }

  OracleSolution sol;
  sol.eta_star = eta;
  sol.lambda_star = oracle_lambda_star(eta, problem);
  sol.dual_value = oracle_dual_objective(eta, problem);
  Matrix S = recover_primal(eta, sol.lambda_star, problem);
  const Vector row_sums = S.rowwise().sum();
  const double row_violation = (row_sums.array() - 1.0).abs().maxCoeff();
  for (int i = 0; i < d; ++i) S.row(i) /= row_sums(i);
  sol.S = std::move(S);
  sol.primal_value = trace_product(problem.C, sol.S);
  const double gap = sol.dual_value - sol.primal_value;
  sol.converged = early || (row_violation <= 1e-4 && gap <= cfg.gap_tol);
  return sol;
}

Vector kl_row_maximizer(const Vector& c, const Vector& center, double r) {
  const int d = static_cast<int>(c.size());
  if (center.size() != d || center.minCoeff() <= 0.0)
    throw InvalidInput("center must be a strictly positive distribution");
  if (r <= 0.0) throw InvalidInput("radius must be positive");
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if (c.maxCoeff() - c.minCoeff() < 1e-14 * scale) return center;
  const double M = c.maxCoeff();
  auto entropy_of = [&](double lambda, Vector& p) {
    const double t = solve_row_gap(c, center, lambda);
    double ent = 0.0;
    for (int j = 0; j < d; ++j) {
      p(j) = lambda * center(j) / (t + (M - c(j)));
      ent += center(j) * std::log(center(j) / p(j));
    }
    return ent;
  };
  Vector p(d);
  double lo = scale, hi = scale;
  while (entropy_of(lo, p) <= r && lo > 1e-300) lo /= 8.0;
  while (entropy_of(hi, p) > r) {
    hi *= 8.0;
    if (hi > 1e300) throw DomainViolation("entropy multiplier search diverged");
  }
  Vector best(d);
  entropy_of(hi, best);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (entropy_of(mid, p) > r)
      lo = mid;
    else {
      hi = mid;
      best = p;
    }
  }
  best /= best.sum();
  return best;
}

}  // namespace mdro
