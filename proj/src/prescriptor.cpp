#include "mdro/prescriptor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int space_dim(const DecisionSpace& space) {
  if (const auto* box = std::get_if<BoxSpace>(&space)) return box->n();
  return std::get<BinaryPolytope>(space).n;
}

struct Memo {
  const Objective* fn;
  std::map<std::vector<double>, double> cache;
  int evaluations = 0;

  double operator()(const Vector& x) {
    std::vector<double> key(x.data(), x.data() + x.size());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ++evaluations;
    const double v = (*fn)(x);
    cache.emplace(std::move(key), v);
    return v;
  }
};

Vector snap_binary(Vector x) {
  for (int i = 0; i < x.size(); ++i) x(i) = x(i) >= 0.5 ? 1.0 : 0.0;
  return x;
}

}  // namespace

bool is_feasible(const DecisionSpace& space, const Vector& x) {
  if (const auto* box = std::get_if<BoxSpace>(&space)) {
    return (x.array() >= box->lower.array() - 1e-12).all() &&
           (x.array() <= box->upper.array() + 1e-12).all();
  }
  const auto& poly = std::get<BinaryPolytope>(space);
  for (int i = 0; i < x.size(); ++i)
    if (x(i) != 0.0 && x(i) != 1.0) return false;
  if (poly.C.size() == 0) return true;
  return ((poly.C * x - poly.b).array() <= 1e-9).all();
}

SearchResult direct_search(const Objective& objective, const DecisionSpace& space,
                           const Vector& x0, const DFOConfig& cfg) {
  const int n = space_dim(space);
  const bool binary = std::holds_alternative<BinaryPolytope>(space);
  if (!is_feasible(space, x0)) throw InvalidInput("starting point is infeasible");

  Memo memo{&objective, {}, 0};
  auto barrier = [&](const Vector& x) { return is_feasible(space, x) ? memo(x) : kInf; };

  std::vector<Vector> directions = cfg.custom_directions;
  if (directions.empty()) {
    for (int i = 0; i < n; ++i) {
      Vector e = Vector::Zero(n);
      e(i) = 1.0;
      directions.push_back(e);
      directions.push_back(-e);
    }
  }

  std::mt19937_64 search_rng = make_stream(cfg.search_seed, 0x5ea7c4);
  Vector x = x0;
  double fx = barrier(x);
  double alpha = cfg.alpha0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    bool success = false;
    if (cfg.search_step) {
      std::normal_distribution<double> gauss(0.0, alpha);
      Vector cand = x;
      for (int i = 0; i < n; ++i) cand(i) += gauss(search_rng);
      if (binary) cand = snap_binary(cand);
      const double fc = barrier(cand);
      if (fc < fx - alpha * alpha) {
        x = cand;
        fx = fc;
        success = true;
      }
    }
    if (!success) {
      // poll in a fixed direction order; first improving point wins
      const double step = binary ? 1.0 : alpha;
      for (const Vector& d : directions) {
        Vector cand = x + step * d;
        if (binary) cand = snap_binary(cand);
        const double fc = barrier(cand);
        if (fc < fx - alpha * alpha) {
          x = cand;
          fx = fc;
          success = true;
          break;
        }
      }
    }
    alpha = success ? std::min(cfg.gamma * alpha, cfg.alpha0 * 1e6)
                    : 0.5 * (cfg.beta1 + cfg.beta2) * alpha;
    if (alpha < 1e-9) break;
  }
  return SearchResult{x, fx, memo.evaluations};
}

SearchResult enumerate_binary(const Objective& objective, const BinaryPolytope& space) {
  const int n = space.n;
  if (n > 20) throw TooLarge("binary enumeration guarded to n <= 20");
  Memo memo{&objective, {}, 0};
  Vector best;
  double best_val = kInf;
  Vector x(n);
  DecisionSpace ds = space;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    for (int i = 0; i < n; ++i) x(i) = (mask >> i) & 1u ? 1.0 : 0.0;
    if (!is_feasible(ds, x)) continue;
    const double v = memo(x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }
  if (best.size() == 0) throw NoFeasiblePoint("no feasible binary point");
  return SearchResult{best, best_val, memo.evaluations};
}

SearchResult minimize_over(const Objective& objective, const DecisionSpace& space,
                           const DFOConfig& dfo_cfg) {
  if (const auto* poly = std::get_if<BinaryPolytope>(&space); poly && poly->n <= 20)
    return enumerate_binary(objective, *poly);
  if (const auto* box = std::get_if<BoxSpace>(&space))
    return direct_search(objective, space, 0.5 * (box->lower + box->upper), dfo_cfg);
  const auto& poly = std::get<BinaryPolytope>(space);
  Vector x0 = Vector::Zero(poly.n);
  if (!is_feasible(space, x0)) throw NoFeasiblePoint("origin infeasible and space too large");
  return direct_search(objective, space, x0, dfo_cfg);
}

SearchResult prescriptor_solve(const std::function<LossVector(const Vector&)>& loss_of,
                               const DecisionSpace& space, const DoubletMatrix& theta_prime,
                               const AmbiguitySpec& spec, const FWConfig& fw_cfg,
                               const DFOConfig& dfo_cfg) {
  Objective objective = [&](const Vector& x) {
    return worst_case_dispatch(loss_of(x), theta_prime, spec, fw_cfg).value;
  };
  return minimize_over(objective, space, dfo_cfg);
}

}  // namespace mdro
