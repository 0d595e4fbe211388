#pragma once

#include "mdro/baselines.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace mdro {

struct BoxSpace {
  Vector lower;
  Vector upper;

  int n() const { return static_cast<int>(lower.size()); }
};

struct BinaryPolytope {  // {x in {0,1}^n : C x <= b}
  Matrix C;
  Vector b;
  int n = 0;
};

using DecisionSpace = std::variant<BoxSpace, BinaryPolytope>;

struct DFOConfig {
  double alpha0 = 1.0;
  double beta1 = 0.5;
  double beta2 = 0.5;
  double gamma = 2.0;
  int max_iters = 500;
  std::vector<Vector> custom_directions;  // empty: +/- coordinate directions
  bool search_step = false;               // optional random-sampling search
  std::uint64_t search_seed = 0;
};

struct SearchResult {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
};

using Objective = std::function<double(const Vector&)>;

bool is_feasible(const DecisionSpace& space, const Vector& x);

// Directional direct search with sufficient decrease f(poll) < f(x) - alpha^2
// and extreme barrier (+inf outside the feasible set). On binary polytopes the
// poll step is snapped to single bit flips.
SearchResult direct_search(const Objective& objective, const DecisionSpace& space,
                           const Vector& x0, const DFOConfig& cfg = {});

// Exact minimizer over the feasible binary points; guarded to n <= 20.
SearchResult enumerate_binary(const Objective& objective, const BinaryPolytope& space);

// Distributionally robust prescriptor for one model estimate: minimizes
// x -> predictor(loss(x), theta', spec) over the decision space, by
// enumeration when the space is a small binary polytope and by direct search
// otherwise. Predictor evaluations are memoized per decision.
SearchResult prescriptor_solve(const std::function<LossVector(const Vector&)>& loss_of,
                               const DecisionSpace& space, const DoubletMatrix& theta_prime,
                               const AmbiguitySpec& spec, const FWConfig& fw_cfg = {},
                               const DFOConfig& dfo_cfg = {});

// Generic minimization used by the experiment harness: enumeration for small
// binary polytopes, direct search otherwise, with memoized objective calls.
SearchResult minimize_over(const Objective& objective, const DecisionSpace& space,
                           const DFOConfig& dfo_cfg = {});

}  // namespace mdro
