#include "bilat/likelihood.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bilat {

namespace {

constexpr double kProbFloor = 1e-300;

[[noreturn]] void vanishing_cell(const char* cell) {
  throw NonfiniteLikelihood(std::string("positive weight on vanishing ") +
                            cell + " cell probability");
}

}  // namespace

void ModelParams::validate_against(const FrequencyTable& table) const {
  const std::size_t want =
      hypothesis == Hypothesis::Null ? 1 : table.num_groups();
  if (pis.size() != want) {
    throw DomainError("ModelParams rate vector has length " +
                      std::to_string(pis.size()) + ", expected " +
                      std::to_string(want));
  }
}

namespace detail {

GroupEval group_eval(double w0, double w1, double w2, double pi,
                     const Theta& theta) {
  GroupEval out{0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
  if (theta.is_independence()) {
    const double q = 1.0 - pi;
    const double p0 = q * q, p1 = 2.0 * q * pi, p2 = pi * pi;
    if (w0 != 0.0) {
      if (!(p0 > kProbFloor)) vanishing_cell("p0");
      out.loglik += w0 * std::log(p0);
      out.d_pi += -2.0 * w0 / q;
    }
    if (w1 != 0.0) {
      if (!(p1 > kProbFloor)) vanishing_cell("p1");
      out.loglik += w1 * std::log(p1);
      out.d_pi += w1 * (1.0 - 2.0 * pi) / (q * pi);
    }
    if (w2 != 0.0) {
      if (!(p2 > kProbFloor)) vanishing_cell("p2");
      out.loglik += w2 * std::log(p2);
      out.d_pi += 2.0 * w2 / pi;
    }
    return out;
  }

  // Diagonal Clayton quantities, all overflow-free: powers of numbers near 1
  // and their reciprocals enter only through exponents divided by theta.
  const double th = theta.clamped();
  const double q = 1.0 - pi;
  const double lq = std::log(q);
  const double sm1 = std::expm1(th * lq);  // q^theta - 1, exact near 0
  const double g = 1.0 - sm1;              // 2 - q^theta
  const double lg = std::log1p(-sm1);
  const double lomega = lg - th * lq;      // log((2 - q^theta)/q^theta)
  const double c = q * std::exp(-lg / th);        // copula value
  const double q_minus_c = -q * std::expm1(-lg / th);
  const double p1 = 2.0 * q_minus_c;
  const double p2 = pi - q_minus_c;

  // dC/dpi = -2 e;  dC/dtheta = C t / (theta^2 g)
  const double e = std::exp(-(lomega / th + lg + lq));
  const double t = lomega * g + 2.0 * th * lq;
  const double dc_dth = c * t / (th * th * g);

  out.d_theta = 0.0;
  if (w0 != 0.0) {
    if (!(c > kProbFloor)) vanishing_cell("p0");
    out.loglik += w0 * std::log(c);
    out.d_pi += -2.0 * w0 / (q * g);  // w0 * (dC/dpi)/C simplified
    out.d_theta += w0 / c;
  }
  if (w1 != 0.0) {
    if (!(p1 > kProbFloor)) vanishing_cell("p1");
    out.loglik += w1 * std::log(p1);
    out.d_pi += 2.0 * w1 * (2.0 * e - 1.0) / p1;
    out.d_theta += -2.0 * w1 / p1;
  }
  if (w2 != 0.0) {
    if (!(p2 > kProbFloor)) vanishing_cell("p2");
    out.loglik += w2 * std::log(p2);
    out.d_pi += 2.0 * w2 * (1.0 - e) / p2;
    out.d_theta += w2 / p2;
  }
  out.d_theta *= dc_dth;
  return out;
}

double group_loglik(double w0, double w1, double w2, double pi,
                    const Theta& theta) {
  return group_eval(w0, w1, w2, pi, theta).loglik;
}

double group_score_pi(double w0, double w1, double w2, double pi,
                      const Theta& theta) {
  return group_eval(w0, w1, w2, pi, theta).d_pi;
}

double group_score_theta(double w0, double w1, double w2, double pi,
                         const Theta& theta) {
  if (theta.is_independence()) {
    throw DomainError("score_theta is undefined at the independence state");
  }
  return group_eval(w0, w1, w2, pi, theta).d_theta;
}

}  // namespace detail

double loglik(const ModelParams& params, const FrequencyTable& table) {
  params.validate_against(table);
  double ll = 0.0;
  for (std::size_t i = 0; i < table.num_groups(); ++i) {
    const GroupCounts& g = table.group(i);
    ll += detail::group_loglik(static_cast<double>(g.m0),
                               static_cast<double>(g.m1),
                               static_cast<double>(g.m2),
                               params.rate(i).value(), params.theta);
  }
  return ll;
}

double score_pi(std::size_t i, const ModelParams& params,
                const FrequencyTable& table) {
  params.validate_against(table);
  const GroupCounts& g = table.group(i);
  return detail::group_score_pi(static_cast<double>(g.m0),
                                static_cast<double>(g.m1),
                                static_cast<double>(g.m2),
                                params.rate(i).value(), params.theta);
}

double score_theta(const ModelParams& params, const FrequencyTable& table) {
  params.validate_against(table);
  double s = 0.0;
  for (std::size_t i = 0; i < table.num_groups(); ++i) {
    const GroupCounts& g = table.group(i);
    s += detail::group_score_theta(static_cast<double>(g.m0),
                                   static_cast<double>(g.m1),
                                   static_cast<double>(g.m2),
                                   params.rate(i).value(), params.theta);
  }
  return s;
}

}  // namespace bilat
