#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdro/prescriptor.hpp"

#include <cmath>

using namespace mdro;

namespace {

BoxSpace box(int n, double lo, double hi) {
  return BoxSpace{Vector::Constant(n, lo), Vector::Constant(n, hi)};
}

Matrix random_ergodic(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Matrix P(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) P(i, j) = unif(rng);
    P.row(i) /= P.row(i).sum();
  }
  return P;
}

}  // namespace

TEST_CASE("direct_search finds the minimizer of a convex quadratic on a box") {
  Vector target(3);
  target << 0.4, -0.7, 1.3;
  Objective f = [&](const Vector& x) { return (x - target).squaredNorm(); };
  DFOConfig cfg;
  cfg.max_iters = 2000;
  const SearchResult sol = direct_search(f, box(3, -2, 2), Vector::Zero(3), cfg);
  CHECK((sol.x - target).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(sol.value < 1e-6);
}

TEST_CASE("direct_search on a constant objective keeps the start point") {
  Objective f = [](const Vector&) { return 3.0; };
  const SearchResult sol = direct_search(f, box(2, -1, 1), Vector::Zero(2), {});
  CHECK(sol.x == Vector::Zero(2));
  CHECK(sol.value == 3.0);
}

TEST_CASE("extreme barrier keeps iterates inside the box") {
  // unconstrained minimizer lies outside; the barrier must confine the search
  Vector target(2);
  target << 5.0, 5.0;
  Objective f = [&](const Vector& x) { return (x - target).squaredNorm(); };
  const SearchResult sol = direct_search(f, box(2, -1, 1), Vector::Zero(2), {});
  CHECK((sol.x.array() <= 1.0 + 1e-12).all());
  CHECK((sol.x.array() >= -1.0 - 1e-12).all());
  CHECK((sol.x - Vector::Constant(2, 1.0)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("enumerate_binary small cases") {
  BinaryPolytope space;
  space.n = 2;
  space.C = Matrix::Ones(1, 2);
  space.b = Vector::Constant(1, 1.0);
  Objective f = [](const Vector& x) { return -x(0) - 2 * x(1); };
  const SearchResult sol = enumerate_binary(f, space);
  CHECK(sol.x(0) == 0.0);
  CHECK(sol.x(1) == 1.0);
  CHECK(sol.value == -2.0);

  BinaryPolytope infeasible;
  infeasible.n = 2;
  infeasible.C = -Matrix::Ones(1, 2);
  infeasible.b = Vector::Constant(1, -5.0);  // needs sum >= 5, impossible
  CHECK_THROWS_AS(enumerate_binary(f, infeasible), NoFeasiblePoint);

  BinaryPolytope huge;
  huge.n = 21;
  CHECK_THROWS_AS(enumerate_binary(f, huge), TooLarge);
}

TEST_CASE("direct_search agrees with enumeration on random binary instances") {
  std::mt19937_64 rng = make_stream(71, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int matches = 0;
  const int n = 8, instances = 20;
  for (int inst = 0; inst < instances; ++inst) {
    Vector c(n);
    for (int j = 0; j < n; ++j) c(j) = gauss(rng);
    BinaryPolytope space;
    space.n = n;
    space.C = Matrix::Ones(1, n);
    space.b = Vector::Constant(1, 4.0);
    Objective f = [&](const Vector& x) { return c.dot(x) + 0.3 * x.sum() * x.sum() / n; };
    const SearchResult exact = enumerate_binary(f, space);
    DFOConfig cfg;
    cfg.max_iters = 400;
    const SearchResult dfo = direct_search(f, space, Vector::Zero(n), cfg);
    CHECK(dfo.value >= exact.value - 1e-12);
    matches += std::abs(dfo.value - exact.value) < 1e-9;
  }
  CHECK(matches >= instances * 9 / 10);  // DFO on discrete sets is heuristic
}

TEST_CASE("prescriptor_solve: collapse and robustness premium") {
  std::mt19937_64 rng = make_stream(72, 0);
  const int d = 4;
  const Matrix P = random_ergodic(d, rng);
  const Vector pi = stationary_from_transition(TransitionMatrix{P}).probabilities;
  const DoubletMatrix theta{pi.asDiagonal() * P};

  Vector prices(d);
  prices << 3, 1, 4, 2;
  auto loss_of = [&](const Vector& x) -> LossVector { return -prices.cwiseProduct(x); };
  BinaryPolytope space;
  space.n = d;
  space.C = Matrix::Ones(1, d);
  space.b = Vector::Constant(1, 2.0);

  // r -> 0: the prescriptor minimizes the SAA objective
  const SearchResult tiny = prescriptor_solve(loss_of, space, theta, {1e-10});
  const SearchResult saa_opt = minimize_over(
      [&](const Vector& x) { return loss_of(x).dot(pi); }, DecisionSpace{space});
  CHECK(tiny.value == doctest::Approx(saa_opt.value).epsilon(1e-6));
  CHECK(tiny.x == saa_opt.x);

  // robustness premium: worst-case optimum dominates the SAA optimum
  const SearchResult robust = prescriptor_solve(loss_of, space, theta, {0.1});
  CHECK(robust.value >= saa_opt.value - 1e-9);

  // single feasible decision: returned as-is with its predictor value
  BinaryPolytope lonely;
  lonely.n = d;
  lonely.C = Matrix(2, d);
  lonely.C.row(0) = Matrix::Ones(1, d);
  lonely.C.row(1) = -Matrix::Ones(1, d);
  lonely.b = Vector::Zero(2);  // only x = 0 is feasible
  const SearchResult only = prescriptor_solve(loss_of, lonely, theta, {0.1});
  CHECK(only.x == Vector::Zero(d));
  CHECK(only.value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("memoization counts unique evaluations only") {
  int calls = 0;
  Objective f = [&](const Vector& x) {
    ++calls;
    return x.squaredNorm();
  };
  BinaryPolytope space;
  space.n = 3;
  const SearchResult sol = enumerate_binary(f, space);
  CHECK(sol.evaluations == 8);
  CHECK(calls == 8);
}
