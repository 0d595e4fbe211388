#include "mdro/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace mdro {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t trial_stream(int T, int trial) {
  return static_cast<std::uint64_t>(trial) * 1000003ULL + static_cast<std::uint64_t>(T);
}

}  // namespace

TransitionMatrix synth_chain(int d, std::mt19937_64& rng) {
  if (d < 2) throw InvalidInput("synth_chain requires d >= 2");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = unif(rng);
  std::uniform_int_distribution<int> cell(0, d * d - 1);
  const int first = cell(rng);
  int second = cell(rng);
  while (second == first) second = cell(rng);
  M(first / d, first % d) = 4.0;
  M(second / d, second % d) = 5.0;
  for (int i = 0; i < d; ++i) M.row(i) /= M.row(i).sum();
  return TransitionMatrix{M};
}

RevenueProblem synth_problem(int n, int d, std::mt19937_64& rng) {
  RevenueProblem problem;
  // exponential draws renormalize to a uniform sample on the simplex
  std::exponential_distribution<double> expo(1.0);
  problem.weights = Vector(n);
  for (int k = 0; k < n; ++k) problem.weights(k) = expo(rng);
  problem.weights /= problem.weights.sum();
  std::uniform_int_distribution<int> price(1, 10);
  problem.prices = Vector(d);
  for (int j = 0; j < d; ++j) problem.prices(j) = price(rng);
  problem.C = Matrix::Ones(1, d);
  problem.b = Vector::Constant(1, std::ceil(d / 2.0));
  for (int k = 0; k < n; ++k) {
    TransitionMatrix P = synth_chain(d, rng);
    problem.stationaries.push_back(stationary_from_transition(P));
    problem.true_thetas.push_back(
        DoubletMatrix{problem.stationaries.back().probabilities.asDiagonal() * P.entries});
    problem.chains.push_back(std::move(P));
  }
  return problem;
}

LossVector revenue_loss(const RevenueProblem& problem, const Vector& x) {
  return -problem.prices.cwiseProduct(x);
}

double true_risk(const RevenueProblem& problem, const Vector& x) {
  const LossVector loss = revenue_loss(problem, x);
  double risk = 0.0;
  for (int k = 0; k < problem.n(); ++k)
    risk += problem.weights(k) * loss.dot(problem.stationaries[k].probabilities);
  return risk;
}

double method_value(const std::string& method, const LossVector& loss,
                    const DoubletMatrix& theta_hat, double r, const FWConfig& fw) {
  if (method == "saa") return saa_value(loss, theta_hat);
  AmbiguitySpec spec{r, DivergenceKind::ConditionalRelativeEntropy};
  if (method == "kl")
    spec.kind = DivergenceKind::KLStationary;
  else if (method == "wass")
    spec.kind = DivergenceKind::WassersteinRows;
  else if (method != "cre")
    throw InvalidInput("unknown method: " + method);
  return worst_case_dispatch(loss, theta_hat, spec, fw).value;
}

std::vector<RiskRow> run_risk_experiment(const RevenueProblem& problem,
                                         const ExperimentConfig& cfg) {
  if (cfg.T_grid.empty() || cfg.r_grid.empty()) throw InvalidInput("empty experiment grid");
  std::vector<RiskRow> rows;
  BinaryPolytope space{problem.C, problem.b, problem.d()};
  for (const int T : cfg.T_grid) {
    for (int trial = 0; trial < cfg.trials; ++trial) {
      // one data draw per (T, trial), shared by every method and radius
      std::mt19937_64 rng = make_stream(cfg.seed, trial_stream(T, trial));
      std::vector<DoubletMatrix> estimates, centers;
      for (int k = 0; k < problem.n(); ++k) {
        const Trajectory traj = simulate(problem.chains[k], 0, T, rng);
        estimates.push_back(estimate_doublet(traj));
        // Robust methods need a strictly positive balanced center; smooth the
        // balanced estimate toward uniform with a weight that vanishes as the
        // sample grows, so the ambiguity center stays consistent.
        const double delta = 1.0 / (static_cast<double>(T) * problem.d());
        centers.push_back(make_positive(ghost_balance(estimates.back(), traj), delta));
      }
      for (const std::string& method : cfg.methods) {
        for (const double r : cfg.r_grid) {
          RiskRow row{method, r, T, trial, kNaN, kNaN};
          try {
            Objective objective = [&](const Vector& x) {
              const LossVector loss = revenue_loss(problem, x);
              double value = 0.0;
              for (int k = 0; k < problem.n(); ++k)
                value += problem.weights(k) *
                         method_value(method, loss,
                                      method == "saa" ? estimates[k] : centers[k], r, cfg.fw);
              return value;
            };
            const SearchResult sol = minimize_over(objective, space);
            row.in_sample = sol.value;
            row.out_of_sample = true_risk(problem, sol.x);
          } catch (const std::exception&) {
            // recorded as NaN, never dropped
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::vector<DisappointmentRow> run_disappointment_experiment(const RevenueProblem& problem,
                                                             const ExperimentConfig& cfg) {
  const std::vector<RiskRow> risk = run_risk_experiment(problem, cfg);
  std::vector<DisappointmentRow> rows;
  for (const std::string& method : cfg.methods) {
    for (const double r : cfg.r_grid) {
      for (const int T : cfg.T_grid) {
        int count = 0, total = 0;
        for (const RiskRow& row : risk) {
          if (row.method != method || row.r != r || row.T != T) continue;
          if (std::isnan(row.out_of_sample)) continue;
          ++total;
          count += row.out_of_sample > row.in_sample;
        }
        rows.push_back({method, r, T, total ? static_cast<double>(count) / total : kNaN});
      }
    }
  }
  return rows;
}

double disappointment_frequency(const LossVector& loss, const DoubletMatrix& theta_true,
                                double r, int T, int trials, std::uint64_t seed,
                                const FWConfig& fw) {
  const auto [pi, P] = doublet_to_chain(theta_true);
  const double truth = loss.dot(pi.probabilities);
  int count = 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng = make_stream(seed, static_cast<std::uint64_t>(trial));
    std::discrete_distribution<int> initial(pi.probabilities.data(),
                                            pi.probabilities.data() + pi.d());
    const int xi0 = initial(rng);
    const DoubletMatrix theta_hat = estimate_doublet(simulate(P, xi0, T, rng));
    const double predicted = predictor(loss, theta_hat, {r}, fw).value;
    count += truth > predicted;
  }
  return static_cast<double>(count) / trials;
}

std::vector<BenchRow> run_scalability_bench(const std::vector<int>& d_list, int T, double r,
                                            int trials, std::uint64_t seed) {
  for (std::size_t i = 1; i < d_list.size(); ++i)
    if (d_list[i] < d_list[i - 1]) throw InvalidInput("d_list must be ascending");
  std::vector<BenchRow> rows;
  for (const int d : d_list) {
    for (int trial = 0; trial < trials; ++trial) {
      std::mt19937_64 rng =
          make_stream(seed, static_cast<std::uint64_t>(d) * 1009ULL + trial);
      const TransitionMatrix P = synth_chain(d, rng);
      const DoubletMatrix theta_hat = estimate_doublet(simulate(P, 0, T, rng));
      std::uniform_int_distribution<int> price(1, 10);
      std::bernoulli_distribution bit(0.5);
      LossVector loss(d);
      for (int j = 0; j < d; ++j) loss(j) = bit(rng) ? -price(rng) : 0.0;
      const auto start = std::chrono::steady_clock::now();
      const WorstCaseSolution sol = predictor(loss, theta_hat, {r});
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      rows.push_back({d, trial, elapsed.count(), sol.iterations});
    }
  }
  return rows;
}

std::string risk_csv(const std::vector<RiskRow>& rows) {
  std::ostringstream out;
  out << "method,r,T,trial,out_of_sample_risk,in_sample_risk\n";  // risks are negative revenue
  for (const RiskRow& row : rows)
    out << row.method << ',' << row.r << ',' << row.T << ',' << row.trial << ','
        << row.out_of_sample << ',' << row.in_sample << '\n';
  return out.str();
}

std::string disappointment_csv(const std::vector<DisappointmentRow>& rows) {
  std::ostringstream out;
  out << "method,r,T,disappointment_frequency\n";
  for (const DisappointmentRow& row : rows)
    out << row.method << ',' << row.r << ',' << row.T << ',' << row.frequency << '\n';
  return out.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "d,trial,wall_seconds,iterations\n";
  for (const BenchRow& row : rows)
    out << row.d << ',' << row.trial << ',' << row.wall_seconds << ',' << row.iterations << '\n';
  return out.str();
}

}  // namespace mdro
