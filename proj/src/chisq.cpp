#include "bilat/chisq.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bilat/errors.hpp"

namespace bilat {

namespace detail {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxIter = 10000;

// Lower series: P(a, x) * Gamma(a) * e^x * x^-a = sum_n x^n / (a)_(n+1)-ish.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper continued fraction by modified Lentz.
double gamma_q_contfrac(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_q requires a > 0");
  if (x < 0.0) throw DomainError("gamma_q requires x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

}  // namespace detail

double chisq_sf(double x, int df) {
  if (df < 1) throw DomainError("chisq_sf requires df >= 1");
  if (x < 0.0) {
    throw DomainError("chisq_sf requires x >= 0, got " + std::to_string(x));
  }
  return detail::gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

}  // namespace bilat
