#pragma once

#include <vector>

#include "bilat/likelihood.hpp"

namespace bilat {

// Outcome of a maximum-likelihood fit under one hypothesis.
struct FitResult {
  ModelParams params_hat;
  double loglik_hat = 0.0;
  bool converged = false;
  double grad_norm = 0.0;  // transformed-scale projected gradient max-norm
  int iterations = 0;      // iterations of the winning start
  int n_starts_used = 0;
  bool boundary_warning = false;
};

// Unconstrained coordinates: logit on every rate, natural log on theta.
std::vector<double> transform(const ModelParams& params);
ModelParams untransform(const std::vector<double>& x,
                        Hypothesis hypothesis = Hypothesis::Alternative);

// Maximizes the log-likelihood over the transformed space with a quasi-Newton
// multi-start schedule (moment initializer plus theta in {0.5, 2, 8}).
// Throws NoConvergence when no start reaches the gradient tolerance.
FitResult fit(const FrequencyTable& table, Hypothesis hypothesis);

// Both fits at once. The alternative fit adds a start at the null optimum
// embedded in the larger space, so loglik_hat(ha) >= loglik_hat(h0) holds by
// construction. fit(table, Alternative) is fit_pair(table).ha.
struct FitPair {
  FitResult h0;
  FitResult ha;
};

FitPair fit_pair(const FrequencyTable& table);

}  // namespace bilat
