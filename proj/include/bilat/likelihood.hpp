#pragma once

#include <vector>

#include "bilat/copula.hpp"
#include "bilat/frequency_table.hpp"

namespace bilat {

enum class Hypothesis { Null, Alternative };

// Model parameters: one shared rate under Null, one rate per group under
// Alternative, plus the Clayton parameter.
struct ModelParams {
  std::vector<Rate> pis;
  Theta theta;
  Hypothesis hypothesis;

  // Rate that applies to group i (the pooled rate under Null).
  const Rate& rate(std::size_t i) const {
    return hypothesis == Hypothesis::Null ? pis.front() : pis.at(i);
  }

  void validate_against(const FrequencyTable& table) const;
};

// Log-likelihood sum_i [ m_i0 log p0 + m_i1 log p1 + m_i2 log p2 ] with the
// 0*log(0) = 0 convention. Throws NonfiniteLikelihood when a positive count
// multiplies a cell probability below 1e-300.
double loglik(const ModelParams& params, const FrequencyTable& table);

// Analytic d_i = dl/dpi_i (the closed-form score component).
double score_pi(std::size_t i, const ModelParams& params,
                const FrequencyTable& table);

// Analytic dl/dtheta, summed over groups.
double score_theta(const ModelParams& params, const FrequencyTable& table);

namespace detail {

// One group's contribution to the log-likelihood and both score components,
// with real-valued weights in place of counts. The public operations sum
// this over groups; the optimizer consumes it fused; tests use the weighted
// form directly for real-weighted oracle checks. d_theta is NaN at the
// independence state.
struct GroupEval {
  double loglik;
  double d_pi;
  double d_theta;
};

GroupEval group_eval(double w0, double w1, double w2, double pi,
                     const Theta& theta);

double group_loglik(double w0, double w1, double w2, double pi,
                    const Theta& theta);
double group_score_pi(double w0, double w1, double w2, double pi,
                      const Theta& theta);
double group_score_theta(double w0, double w1, double w2, double pi,
                         const Theta& theta);

}  // namespace detail

}  // namespace bilat
