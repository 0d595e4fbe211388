#pragma once

#include "mdro/prescriptor.hpp"

#include <string>
#include <vector>

namespace mdro {

// Revenue-maximization instance: per-group true chains, group weights, brand
// prices, and a linear decision constraint C x <= b over x in {0,1}^d. Losses
// enter as negative revenue -a_j x_j so every solver minimizes.
struct RevenueProblem {
  Vector weights;  // in the simplex
  Vector prices;   // positive
  Matrix C;
  Vector b;
  std::vector<TransitionMatrix> chains;
  std::vector<StationaryDistribution> stationaries;
  std::vector<DoubletMatrix> true_thetas;

  int n() const { return static_cast<int>(weights.size()); }
  int d() const { return static_cast<int>(prices.size()); }
};

struct ExperimentConfig {
  std::vector<int> T_grid{10, 300, 500};
  std::vector<double> r_grid{0.1};
  int trials = 100;
  std::uint64_t seed = 20240817;
  std::vector<std::string> methods{"saa", "cre", "kl", "wass"};
  FWConfig fw;
};

struct RiskRow {
  std::string method;
  double r = 0.0;
  int T = 0;
  int trial = 0;
  double out_of_sample = 0.0;  // exact, from the known chains
  double in_sample = 0.0;      // minimized robust objective
};

struct DisappointmentRow {
  std::string method;
  double r = 0.0;
  int T = 0;
  double frequency = 0.0;
};

struct BenchRow {
  int d = 0;
  int trial = 0;
  double wall_seconds = 0.0;
  int iterations = 0;
};

// Uniform [0,1]^{d x d}, two distinct random entries raised to 4 and 5,
// rows normalized; strictly positive hence ergodic.
TransitionMatrix synth_chain(int d, std::mt19937_64& rng);

// Weights uniform on the simplex, integer prices uniform on {1..10}^d,
// per-group chains from synth_chain, budget constraint sum x_j <= ceil(d/2).
RevenueProblem synth_problem(int n, int d, std::mt19937_64& rng);

// State-wise loss of decision x: loss_j = -a_j x_j.
LossVector revenue_loss(const RevenueProblem& problem, const Vector& x);

// Exact out-of-sample risk sum_k w_k <loss(x), pi_k>.
double true_risk(const RevenueProblem& problem, const Vector& x);

// Aggregated in-sample objective of one method at the given estimates.
double method_value(const std::string& method, const LossVector& loss,
                    const DoubletMatrix& theta_hat, double r, const FWConfig& fw);

std::vector<RiskRow> run_risk_experiment(const RevenueProblem& problem,
                                         const ExperimentConfig& cfg);

std::vector<DisappointmentRow> run_disappointment_experiment(const RevenueProblem& problem,
                                                             const ExperimentConfig& cfg);

// Fixed-decision predictor disappointment for a single known chain:
// fraction of trials where the true value exceeds the robust prediction.
double disappointment_frequency(const LossVector& loss, const DoubletMatrix& theta_true,
                                double r, int T, int trials, std::uint64_t seed,
                                const FWConfig& fw = {});

std::vector<BenchRow> run_scalability_bench(const std::vector<int>& d_list, int T = 5000,
                                            double r = 1.0, int trials = 10,
                                            std::uint64_t seed = 20240817);

std::string risk_csv(const std::vector<RiskRow>& rows);
std::string disappointment_csv(const std::vector<DisappointmentRow>& rows);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace mdro
