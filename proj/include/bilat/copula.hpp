#pragma once


#include "bilat/errors.hpp"

namespace bilat {

// Clayton dependence parameter. The strict family requires theta > 0; the
// independence limit theta -> 0 is a distinguished state, never the value 0
// pushed through the power formula.
class Theta {
 public:
  explicit Theta(double value);

  static Theta independence() { return Theta(); }

  bool is_independence() const { return independent_; }

  // Strict-family value; throws if this is the independence state.
  double value() const;

  // Value clamped from above to max_theta for formula evaluation; beyond it
  // the copula is within machine epsilon of min(u, v). Small values are
  // evaluated as-is through the stable forms.
  double clamped() const;

  static constexpr double min_theta = 1e-4;   // optimizer floor
  static constexpr double max_theta = 1e6;    // evaluation upper clamp

 private:
  Theta() : value_(0.0), independent_(true) {}
  double value_;
  bool independent_;
};

// Per-eye success/disease probability, strictly inside (0, 1).
class Rate {
 public:
  explicit Rate(double value);
  double value() const { return value_; }

 private:
  double value_;
};

// Probabilities of 0, 1, 2 affected eyes for one group, plus the copula
// value that generated them: p0 = C, p1 = 2(1-pi) - 2C, p2 = 1 - 2(1-pi) + C.
struct CellProbs {
  double p0;
  double p1;
  double p2;
  double c_value;
};

// C_theta(u, v) = (u^-theta + v^-theta - 1)^(-1/theta); u*v at independence.
// Boundary identities C(u,1)=u, C(1,v)=v, C(u,0)=C(0,v)=0 hold exactly.
double clayton_cdf(double u, double v, const Theta& theta);

// Joint outcome probabilities for a group with rate pi and dependence theta.
CellProbs cell_probs(const Rate& pi, const Theta& theta);

// Kendall's tau = theta / (theta + 2); 0 at independence.
double kendall_tau(const Theta& theta);

// Inverse of kendall_tau: theta = 2 tau / (1 - tau), for tau in (0, 1).
Theta tau_to_theta(double tau);

// Within-pair Pearson correlation of the two binary outcomes:
// rho = (C(1-pi, 1-pi) - (1-pi)^2) / (pi (1-pi)).
double pearson_rho(const Rate& pi, const Theta& theta);

// Parameters of the three classical dependence models that produce the same
// copula value at (pi, theta): Rosner's R, Donner's rho, Dallal's gamma.
struct ClassicalEquivalents {
  double rosner_r;
  double donner_rho;
  double dallal_gamma;
};

ClassicalEquivalents classical_equivalents(const Rate& pi, const Theta& theta);

}  // namespace bilat
