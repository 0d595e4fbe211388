#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdro/wc_solver.hpp"

#include <cmath>

using namespace mdro;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix coin_theta1(double e) { return mat2((1 - e) / 2, e / 2, e / 2, (1 - e) / 2); }

Matrix random_ergodic(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Matrix P(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) P(i, j) = unif(rng);
    P.row(i) /= P.row(i).sum();
  }
  return P;
}

// brute-force worst case over 2x2 row-stochastic matrices
double grid_worst_case_2d(const Vector& loss, const Vector& pi_prime, const Matrix& P_prime,
                          double r, double step = 1e-3) {
  double best = -std::numeric_limits<double>::infinity();
  Matrix P(2, 2);
  for (double p11 = step; p11 < 1.0; p11 += step) {
    for (double p21 = step; p21 < 1.0; p21 += step) {
      P << p11, 1 - p11, p21, 1 - p21;
      if (weighted_row_entropy(pi_prime, P_prime, P) > r) continue;
      best = std::max(best, psi(loss, TransitionMatrix{P}));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("psi closed forms") {
  std::mt19937_64 rng = make_stream(51, 0);
  for (int d : {2, 4, 9}) {
    const TransitionMatrix P{random_ergodic(d, rng)};
    CHECK(psi(Vector::Constant(d, 3.25), P) == doctest::Approx(3.25).epsilon(1e-12));
  }

  Vector loss(2);
  loss << 1, 0;
  CHECK(psi(loss, TransitionMatrix{mat2(0.7, 0.3, 0.1, 0.9)}) ==
        doctest::Approx(0.25).epsilon(1e-12));

  Vector loss12(2);
  loss12 << 1, 2;
  for (double e : {0.1, 0.3, 0.45}) {
    const TransitionMatrix coin{mat2(1 - e, e, e, 1 - e)};
    CHECK(psi(loss12, coin) == doctest::Approx(1.5).epsilon(1e-12));
  }
}

TEST_CASE("grad_psi: zero for constant loss, matches finite differences") {
  std::mt19937_64 rng = make_stream(52, 0);
  const TransitionMatrix P{random_ergodic(5, rng)};
  CHECK(grad_psi(Vector::Constant(5, 2.0), P).cwiseAbs().maxCoeff() < 1e-12);

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int d : {2, 5, 10}) {
    for (int seed = 0; seed < 10; ++seed) {
      std::mt19937_64 r2 = make_stream(53, d * 100 + seed);
      const Matrix base = random_ergodic(d, r2);
      Vector loss(d);
      for (int i = 0; i < d; ++i) loss(i) = gauss(r2);
      const Matrix G = grad_psi(loss, TransitionMatrix{base});
      const double h = 1e-5;
      double max_rel = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j + 1 < d; ++j) {
          // project the perturbation onto the row-sum constraint: move mass
          // between columns j and d-1
          Matrix Pp = base, Pm = base;
          Pp(i, j) += h;
          Pp(i, d - 1) -= h;
          Pm(i, j) -= h;
          Pm(i, d - 1) += h;
          const double fd =
              (psi(loss, TransitionMatrix{Pp}) - psi(loss, TransitionMatrix{Pm})) / (2 * h);
          const double an = G(i, j) - G(i, d - 1);
          max_rel = std::max(max_rel, std::abs(fd - an) / std::max(1.0, std::abs(an)));
        }
      }
      CHECK(max_rel <= 1e-6);
    }
  }
}

TEST_CASE("d=2 reduced Hessian determinant is negative (saddle structure)") {
  // Psi~(P11, P21) with the slack entries eliminated; det of its Hessian is
  // -(L1-L2)^2 / (1 - P11 + P21)^4, always negative when L1 != L2
  Vector loss(2);
  loss << 2.0, -1.0;
  auto psit = [&](double p11, double p21) {
    return psi(loss, TransitionMatrix{mat2(p11, 1 - p11, p21, 1 - p21)});
  };
  std::mt19937_64 rng = make_stream(54, 0);
  std::uniform_real_distribution<double> unif(0.15, 0.85);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = unif(rng), b = unif(rng);
    const double h = 1e-4;
    const double faa = (psit(a + h, b) - 2 * psit(a, b) + psit(a - h, b)) / (h * h);
    const double fbb = (psit(a, b + h) - 2 * psit(a, b) + psit(a, b - h)) / (h * h);
    const double fab = (psit(a + h, b + h) - psit(a + h, b - h) - psit(a - h, b + h) +
                        psit(a - h, b - h)) /
                       (4 * h * h);
    const double det = faa * fbb - fab * fab;
    const double expected = -std::pow(loss(0) - loss(1), 2) / std::pow(1 - a + b, 4);
    CHECK(det == doctest::Approx(expected).epsilon(1e-3));
    CHECK(det < 0.0);
  }
}

TEST_CASE("line_search: identity segment, ascent guarantee, dense-scan match") {
  Vector loss(2);
  loss << 1, 0;
  const Matrix P = mat2(0.7, 0.3, 0.1, 0.9);
  CHECK(line_search(loss, P, P) == 0.0);

  std::mt19937_64 rng = make_stream(55, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_ergodic(2, rng);
    const Matrix B = random_ergodic(2, rng);
    const double gamma = line_search(loss, A, B);
    CHECK(gamma >= 0.0);
    CHECK(gamma <= 1.0);
    const double base = psi(loss, TransitionMatrix{A});
    const double moved = psi(loss, TransitionMatrix{A + gamma * (B - A)});
    CHECK(moved >= base - 1e-12);

    double scan_best = -1e300, scan_arg = 0.0;
    for (int k = 0; k <= 100000; ++k) {
      const double g = k / 100000.0;
      const double v = psi(loss, TransitionMatrix{A + g * (B - A)});
      if (v > scan_best) {
        scan_best = v;
        scan_arg = g;
      }
    }
    CHECK(moved == doctest::Approx(scan_best).epsilon(1e-9));
    (void)scan_arg;
  }
}

TEST_CASE("frank_wolfe_worst_case: shrink limit, grid truth, monotone radii") {
  const DoubletMatrix theta{coin_theta1(0.3)};
  Vector loss(2);
  loss << 1, 0;

  const auto [pi, P] = doublet_to_chain(theta);
  const double center_value = psi(loss, P);
  const WorstCaseSolution tiny = frank_wolfe_worst_case(loss, theta, {1e-10});
  CHECK(tiny.value == doctest::Approx(center_value).epsilon(1e-6));

  const WorstCaseSolution sol = frank_wolfe_worst_case(loss, theta, {0.05});
  CHECK(sol.converged);
  const double truth = grid_worst_case_2d(loss, pi.probabilities, P.entries, 0.05);
  CHECK(std::abs(sol.value - truth) < 2e-3);

  const double v1 = frank_wolfe_worst_case(loss, theta, {0.01}).value;
  const double v2 = frank_wolfe_worst_case(loss, theta, {0.1}).value;
  const double v3 = frank_wolfe_worst_case(loss, theta, {1.0}).value;
  CHECK(v1 <= v2 + 1e-9);
  CHECK(v2 <= v3 + 1e-9);
  CHECK(sol.value >= center_value - 1e-8);
}

TEST_CASE("frank-wolfe contract: trace, gap, and iterate feasibility") {
  std::mt19937_64 rng = make_stream(56, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 10;
    const Matrix P = random_ergodic(d, rng);
    const Vector pi = [&] {
      return stationary_from_transition(TransitionMatrix{P}).probabilities;
    }();
    DoubletMatrix theta{pi.asDiagonal() * P};
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector loss(d);
    for (int i = 0; i < d; ++i) loss(i) = gauss(rng);

    const WorstCaseSolution sol = frank_wolfe_worst_case(loss, theta, {1.0});
    CHECK(sol.converged);
    CHECK(sol.final_gap <= 1e-4);
    CHECK(sol.iterations <= 5000);
    for (std::size_t k = 1; k < sol.trace.size(); ++k)
      CHECK(sol.trace[k].objective >= sol.trace[k - 1].objective - 1e-10);
    // final iterate feasibility
    for (int i = 0; i < d; ++i)
      CHECK(sol.P_star.entries.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(weighted_row_entropy(pi, P, sol.P_star.entries) <= 1.0 + 1e-8);
  }
}

TEST_CASE("iteration count scales gently with the gap tolerance") {
  const DoubletMatrix theta{coin_theta1(0.25)};
  Vector loss(2);
  loss << 1, 0;
  FWConfig loose, tight;
  loose.gap_tol = 1e-3;
  tight.gap_tol = 5e-4;
  const int n_loose = frank_wolfe_worst_case(loss, theta, {0.2}, loose).iterations;
  const int n_tight = frank_wolfe_worst_case(loss, theta, {0.2}, tight).iterations;
  CHECK(n_tight <= 5 * std::max(1, n_loose));
}

TEST_CASE("predictor handles raw sparse estimates and tracks the truth") {
  std::mt19937_64 rng = make_stream(57, 0);
  const Matrix P = random_ergodic(5, rng);
  const Trajectory traj = simulate(TransitionMatrix{P}, 0, 5, rng);
  const DoubletMatrix raw = estimate_doublet(traj);  // has zero rows
  Vector loss(5);
  loss << 1, -1, 2, 0, 0.5;
  const WorstCaseSolution sol = predictor(loss, raw, {0.3});
  CHECK(std::isfinite(sol.value));
  CHECK(sol.converged);
}
