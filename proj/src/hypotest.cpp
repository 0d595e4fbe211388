#include "mdro/hypotest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Free parameters are the first d-1 entries of each transition row; the last
// entry is the slack. Balanced doublets are exactly diag(pi(P)) * P, so the
// grid never leaves the feasible manifold of stationary models.
bool params_to_doublet(const std::vector<double>& x, int d, DoubletMatrix* out) {
  Matrix P(d, d);
  for (int i = 0; i < d; ++i) {
    double sum = 0.0;
    for (int j = 0; j + 1 < d; ++j) {
      const double v = x[static_cast<std::size_t>(i) * (d - 1) + j];
      if (v <= 1e-9) return false;
      P(i, j) = v;
      sum += v;
    }
    const double last = 1.0 - sum;
    if (last <= 1e-9) return false;
    P(i, d - 1) = last;
  }
  StationaryDistribution pi;
  try {
    pi = stationary_from_transition(TransitionMatrix{P});
  } catch (const SingularSystem&) {
    return false;
  }
  if ((pi.probabilities.array() <= 0.0).any()) return false;
  out->entries = pi.probabilities.asDiagonal() * P;
  return true;
}

}  // namespace

void HypothesisPair::validate() const {
  theta1.validate();
  theta2.validate();
  if (theta1.d() != theta2.d()) throw InvalidInput("hypothesis pair dimension mismatch");
  if (!theta1.is_balanced(1e-9) || !theta2.is_balanced(1e-9))
    throw InvalidInput("hypothesis models must have balanced marginals");
}

int decide(const DoubletMatrix& theta_hat, const HypothesisPair& pair) {
  if (theta_hat.d() != pair.d()) throw InvalidInput("estimate dimension mismatch");
  const double d1 = conditional_relative_entropy(theta_hat, pair.theta1);
  const double d2 = conditional_relative_entropy(theta_hat, pair.theta2);
  return d1 < d2 ? 1 : 2;
}

ErrorRates error_rates_mc(const HypothesisPair& pair, int T, int trials, std::uint64_t seed) {
  if (T < 1 || trials < 1) throw InvalidInput("T and trials must be >= 1");
  pair.validate();
  const auto [pi1, P1] = doublet_to_chain(pair.theta1);
  const auto [pi2, P2] = doublet_to_chain(pair.theta2);

  auto misclassified = [&](const StationaryDistribution& pi, const TransitionMatrix& P,
                           std::mt19937_64& rng, int truth) {
    std::discrete_distribution<int> initial(pi.probabilities.data(),
                                            pi.probabilities.data() + pi.d());
    const int xi0 = initial(rng);
    const Trajectory traj = simulate(P, xi0, T, rng);
    return decide(estimate_doublet(traj), pair) != truth;
  };

  int errs1 = 0, errs2 = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng1 = make_stream(seed, 2ULL * static_cast<std::uint64_t>(t));
    std::mt19937_64 rng2 = make_stream(seed, 2ULL * static_cast<std::uint64_t>(t) + 1ULL);
    errs1 += misclassified(pi1, P1, rng1, 1);
    errs2 += misclassified(pi2, P2, rng2, 2);
  }
  ErrorRates out;
  out.alpha_hat = static_cast<double>(errs1) / trials;
  out.beta_hat = static_cast<double>(errs2) / trials;
  out.T = T;
  out.trials = trials;
  return out;
}

double decay_rate(const HypothesisPair& pair, int grid_resolution) {
  const int d = pair.d();
  if (d > 3) throw TooLarge("decay_rate grid search guarded to d <= 3");
  if (grid_resolution < 3) throw InvalidInput("grid_resolution must be >= 3");
  pair.validate();
  if ((pair.theta1.entries - pair.theta2.entries).cwiseAbs().maxCoeff() < 1e-12) return 0.0;

  const int n_params = d * (d - 1);
  // Keep the full grid below ~1e6 evaluations regardless of d.
  int m = grid_resolution;
  while (std::pow(static_cast<double>(m), n_params) > 1.2e6 && m > 3) --m;

  auto objective = [&](const std::vector<double>& x) {
    DoubletMatrix theta;
    if (!params_to_doublet(x, d, &theta)) return kInf;
    const double d1 = conditional_relative_entropy(theta, pair.theta1);
    const double d2 = conditional_relative_entropy(theta, pair.theta2);
    if (!(d1 >= d2)) return kInf;  // type-I rejection region requires D1 >= D2
    return d1;
  };

  std::vector<double> x(n_params), best_x;
  double best = kInf;
  std::vector<int> idx(n_params, 1);
  const double step = 1.0 / (m + 1);
  bool done = false;
  while (!done) {
    for (int k = 0; k < n_params; ++k) x[k] = idx[k] * step;
    const double v = objective(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
    int k = 0;
    for (; k < n_params; ++k) {
      if (++idx[k] <= m) break;
      idx[k] = 1;
    }
    done = (k == n_params);
  }
  if (!std::isfinite(best)) return 0.0;

  // compass refinement with extreme barrier on the rejection-region constraint
  double alpha = step;
  x = best_x;
  while (alpha > 1e-8) {
    bool improved = false;
    for (int k = 0; k < n_params && !improved; ++k) {
      for (const double s : {alpha, -alpha}) {
        std::vector<double> y = x;
        y[k] += s;
        const double v = objective(y);
        if (v < best) {
          best = v;
          x = y;
          improved = true;
          break;
        }
      }
    }
    if (!improved) alpha *= 0.5;
  }
  return best;
}

HypothesisPair coin_pair(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
  const double e = epsilon;
  HypothesisPair pair;
  pair.theta1.entries = Matrix(2, 2);
  pair.theta1.entries << (1 - e) / 2, e / 2, e / 2, (1 - e) / 2;
  pair.theta2.entries = Matrix(2, 2);
  pair.theta2.entries << e * e, e * (1 - e), e * (1 - e), (1 - e) * (1 - e);
  return pair;
}

double coin_entropy(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
  return epsilon * (1.0 - 2.0 * epsilon) * std::log((1.0 - epsilon) / epsilon);
}

}  // namespace mdro
