#pragma once

#include "mdro/markov.hpp"

namespace mdro {

struct HypothesisPair {
  DoubletMatrix theta1;
  DoubletMatrix theta2;

  int d() const { return theta1.d(); }
  void validate() const;
};

struct ErrorRates {
  double alpha_hat = 0.0;  // P(verdict 2 | chain 1): type I
  double beta_hat = 0.0;   // P(verdict 1 | chain 2): type II
  int T = 0;
  int trials = 0;
};

// Verdict 1 iff D_c(theta_hat || theta1) < D_c(theta_hat || theta2) strictly;
// ties (including +inf vs +inf) go to 2. The acceptance region for chain 1 is
// open.
int decide(const DoubletMatrix& theta_hat, const HypothesisPair& pair);

// Seeded Monte Carlo estimate of both error probabilities. Each trial draws
// its own substream, so enlarging `trials` never perturbs earlier trials.
ErrorRates error_rates_mc(const HypothesisPair& pair, int T, int trials, std::uint64_t seed);

// Large-deviations decay rate of the type-I error:
//   min D_c(theta' || theta1)  s.t.  D_c(theta' || theta1) >= D_c(theta' || theta2)
// over balanced doublet models, by dense grid over the transition-matrix
// parametrization followed by compass refinement. Guarded to d <= 3.
double decay_rate(const HypothesisPair& pair, int grid_resolution = 60);

// Markovian coin instances: theta1 = [[ (1-e)/2, e/2 ], [ e/2, (1-e)/2 ]],
// theta2 = [[ e^2, e(1-e) ], [ e(1-e), (1-e)^2 ]].
HypothesisPair coin_pair(double epsilon);

// Closed form D_c(theta2(e) || theta1(e)) = e (1-2e) log((1-e)/e).
double coin_entropy(double epsilon);

}  // namespace mdro
