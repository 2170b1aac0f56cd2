#include "bilat/copula.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bilat {

Theta::Theta(double value) : value_(value), independent_(false) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError("Theta must be finite and > 0 (got " +
                      std::to_string(value) +
                      "); use Theta::independence() for the limit");
  }
}

double Theta::value() const {
  if (independent_) {
    throw DomainError("Theta::value() called on the independence state");
  }
  return value_;
}

double Theta::clamped() const { return std::min(value(), max_theta); }

Rate::Rate(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw DomainError("Rate must lie strictly inside (0, 1), got " +
                      std::to_string(value));
  }
}

double clayton_cdf(double u, double v, const Theta& theta) {
  if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0)) {
    throw DomainError("clayton_cdf arguments must lie in [0, 1]");
  }
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  if (theta.is_independence()) return u * v;

  const double th = theta.clamped();
  const double a = -th * std::log(u);  // u^-theta = e^a, a > 0
  const double b = -th * std::log(v);

  // log(u^-th + v^-th - 1) without forming the large powers. For moderate
  // exponents the expm1/log1p route is exact down to the theta -> 0 limit;
  // for large ones factor out the dominant term.
  double log_arg;
  if (std::max(a, b) < 700.0) {
    const double s = std::expm1(a) + std::expm1(b);
    if (s < 1e-14) {
      // theta -> 0 series: C = uv + O(theta)
      return u * v;
    }
    log_arg = std::log1p(s);
  } else {
    const double m = std::max(a, b);
    log_arg = m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
  }
  return std::exp(-log_arg / th);
}

namespace {

// Shared diagonal quantities for q = 1 - pi: C(q, q) = q * G^(-1/theta)
// with G = 2 - q^theta.
struct Diag {
  double q;
  double log_g_over_theta;  // log(2 - q^theta) / theta
};

Diag diag_parts(double pi, double th) {
  const double q = 1.0 - pi;
  const double lq = std::log(q);
  // expm1/log1p keep full precision in 2 - q^theta as theta -> 0.
  const double sm1 = std::expm1(th * lq);  // q^theta - 1
  const double lg = std::log1p(-sm1);      // log(2 - q^theta)
  return {q, lg / th};
}

}  // namespace

CellProbs cell_probs(const Rate& pi, const Theta& theta) {
  const double p = pi.value();
  const double q = 1.0 - p;
  if (theta.is_independence()) {
    return {q * q, 2.0 * q * p, p * p, q * q};
  }
  const Diag d = diag_parts(p, theta.clamped());
  const double c = d.q * std::exp(-d.log_g_over_theta);
  // q - C = -q * expm1(-log_g/theta) is exact where 1 - 2q + C cancels.
  const double q_minus_c = -d.q * std::expm1(-d.log_g_over_theta);
  const double p1 = 2.0 * q_minus_c;
  const double p2 = std::max(p - q_minus_c, 0.0);
  return {c, p1, p2, c};
}

double kendall_tau(const Theta& theta) {
  if (theta.is_independence()) return 0.0;
  const double th = theta.value();
  return th / (th + 2.0);
}

Theta tau_to_theta(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("tau must lie strictly inside (0, 1), got " +
                      std::to_string(tau));
  }
  return Theta(2.0 * tau / (1.0 - tau));
}

double pearson_rho(const Rate& pi, const Theta& theta) {
  if (theta.is_independence()) return 0.0;
  const double p = pi.value();
  const Diag d = diag_parts(p, theta.clamped());
  // C - q^2 = q^2 * expm1(-(log_g/theta + log q))
  const double excess = d.q * std::expm1(-(d.log_g_over_theta + std::log(d.q)));
  return excess / p;
}

ClassicalEquivalents classical_equivalents(const Rate& pi, const Theta& theta) {
  const double p = pi.value();
  const double c = cell_probs(pi, theta).c_value;
  return {
      (c + 2.0 * p - 1.0) / (p * p),  // C = R pi^2 - 2 pi + 1
      pearson_rho(pi, theta),         // C = (1-rho) pi^2 + (rho-2) pi + 1
      (c - 1.0) / p + 2.0,            // C = (gamma-2) pi + 1
  };
}

}  // namespace bilat
