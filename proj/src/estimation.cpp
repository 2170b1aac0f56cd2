#include "bilat/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bilat/optim.hpp"

namespace bilat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Evaluation clamp on rates; keeps q = 1 - pi away from exact zero when a
// line-search trial wanders far out.
constexpr double kRateClamp = 1e-12;
const double kLogThetaFloor = std::log(Theta::min_theta);
const double kLogThetaCeil = std::log(Theta::max_theta);

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamped_rate(double x) {
  return std::clamp(logistic(x), kRateClamp, 1.0 - kRateClamp);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

// Negated log-likelihood on the transformed coordinates, with the analytic
// gradient and a finite-difference fallback when the analytic one goes
// nonfinite at an extreme trial point.
class TransformedNegLoglik {
 public:
  TransformedNegLoglik(const FrequencyTable& table, Hypothesis hyp)
      : table_(table), hyp_(hyp) {}

  std::size_t dim() const {
    return (hyp_ == Hypothesis::Null ? 1 : table_.num_groups()) + 1;
  }

  double operator()(const std::vector<double>& x,
                    std::vector<double>& grad) const {
    try {
      bool grad_ok = true;
      const double f = eval(x, &grad, &grad_ok);
      if (!std::isfinite(f)) {
        std::fill(grad.begin(), grad.end(), 0.0);
        return kInf;
      }
      if (!grad_ok) numeric_gradient(x, grad);
      return f;
    } catch (const NonfiniteLikelihood&) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return kInf;
    }
  }

  double value(const std::vector<double>& x) const {
    try {
      return eval(x, nullptr, nullptr);
    } catch (const NonfiniteLikelihood&) {
      return kInf;
    }
  }

 private:
  double eval(const std::vector<double>& x, std::vector<double>* grad,
              bool* grad_ok) const {
    const std::size_t n = x.size();
    const double th = std::exp(x[n - 1]);
    const Theta theta(std::clamp(th, Theta::min_theta, Theta::max_theta));
    if (grad != nullptr) std::fill(grad->begin(), grad->end(), 0.0);
    double negll = 0.0;
    double gth = 0.0;
    for (std::size_t i = 0; i < table_.num_groups(); ++i) {
      const std::size_t k = hyp_ == Hypothesis::Null ? 0 : i;
      const double pi = clamped_rate(x[k]);
      const GroupCounts& gc = table_.group(i);
      const auto ev = detail::group_eval(static_cast<double>(gc.m0),
                                         static_cast<double>(gc.m1),
                                         static_cast<double>(gc.m2), pi, theta);
      negll -= ev.loglik;
      if (grad != nullptr) {
        (*grad)[k] -= ev.d_pi * pi * (1.0 - pi);
        gth -= ev.d_theta * th;
      }
    }
    if (grad != nullptr) {
      (*grad)[n - 1] = gth;
      for (double g : *grad) {
        if (!std::isfinite(g)) {
          *grad_ok = false;
          break;
        }
      }
    }
    return negll;
  }

  void numeric_gradient(const std::vector<double>& x,
                        std::vector<double>& grad) const {
    constexpr double h = 1e-6;
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xp[i] = x[i] + h;
      const double fp = value(xp);
      xp[i] = x[i] - h;
      const double fm = value(xp);
      xp[i] = x[i];
      grad[i] = (fp - fm) / (2.0 * h);
    }
  }

  const FrequencyTable& table_;
  Hypothesis hyp_;
};

// Moment rate (m1 + 2 m2) / (2 m), clamped to [0.02, 0.98].
double moment_rate(std::int64_t m1, std::int64_t m2, std::int64_t m) {
  const double r = static_cast<double>(m1 + 2 * m2) / (2.0 * static_cast<double>(m));
  return std::clamp(r, 0.02, 0.98);
}

// Finds theta with C_theta(1-pi, 1-pi) = c by bisection on log theta
// (the copula value is increasing in theta).
double invert_copula_value(double pi, double c) {
  double lo = std::log(1e-3), hi = std::log(1e3);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double cm = cell_probs(Rate(pi), Theta(std::exp(mid))).c_value;
    (cm < c ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

// Moment-matched concordance start for theta: match each group's empirical
// C = m0/m inside the copula's attainable band, average the implied
// Kendall taus weighted by group size.
double moment_theta(const FrequencyTable& table) {
  double tau_sum = 0.0, weight = 0.0;
  for (std::size_t i = 0; i < table.num_groups(); ++i) {
    const GroupCounts& gc = table.group(i);
    const double m = static_cast<double>(gc.total());
    const double pi = moment_rate(gc.m1, gc.m2, gc.total());
    const double q = 1.0 - pi;
    const double lo = q * q, hi = q;
    const double pad = 1e-6 * (hi - lo);
    const double c = std::clamp(static_cast<double>(gc.m0) / m, lo + pad, hi - pad);
    const double th = invert_copula_value(pi, c);
    tau_sum += m * th / (th + 2.0);
    weight += m;
  }
  if (weight <= 0.0) return 2.0;
  const double tau = std::clamp(tau_sum / weight, 1e-6, 0.95);
  return std::clamp(2.0 * tau / (1.0 - tau), 0.1, 20.0);
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9; }

}  // namespace

std::vector<double> transform(const ModelParams& params) {
  std::vector<double> x;
  x.reserve(params.pis.size() + 1);
  for (const Rate& r : params.pis) x.push_back(logit(r.value()));
  x.push_back(std::log(params.theta.value()));
  return x;
}

ModelParams untransform(const std::vector<double>& x, Hypothesis hypothesis) {
  if (x.size() < 2) {
    throw DomainError("untransform needs at least one rate plus theta");
  }
  std::vector<Rate> pis;
  pis.reserve(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    pis.emplace_back(clamped_rate(x[i]));
  }
  const double th = std::clamp(std::exp(x.back()), Theta::min_theta,
                               Theta::max_theta);
  return ModelParams{std::move(pis), Theta(th), hypothesis};
}

namespace {

// Shared core: scheduled multi-start BFGS, optionally with one extra start.
FitResult fit_impl(const FrequencyTable& table, Hypothesis hypothesis,
                   const std::vector<double>* extra_start) {
  const TransformedNegLoglik objective(table, hypothesis);
  const std::size_t n = objective.dim();
  const std::size_t npi = n - 1;

  std::vector<double> pi_start(npi);
  if (hypothesis == Hypothesis::Null) {
    pi_start[0] = moment_rate(table.column_total(1), table.column_total(2),
                              table.total());
  } else {
    for (std::size_t i = 0; i < npi; ++i) {
      const GroupCounts& gc = table.group(i);
      pi_start[i] = moment_rate(gc.m1, gc.m2, gc.total());
    }
  }
  const std::array<double, 4> theta_starts = {moment_theta(table), 0.5, 2.0,
                                              8.0};

  BfgsOptions opts;
  opts.lower.assign(n, -40.0);
  opts.upper.assign(n, 40.0);
  opts.lower[npi] = kLogThetaFloor;
  opts.upper[npi] = kLogThetaCeil;

  std::vector<std::vector<double>> starts;
  starts.reserve(theta_starts.size() + 1);
  for (double th0 : theta_starts) {
    std::vector<double> x0(n);
    for (std::size_t i = 0; i < npi; ++i) x0[i] = logit(pi_start[i]);
    x0[npi] = std::log(th0);
    starts.push_back(std::move(x0));
  }
  if (extra_start != nullptr) starts.push_back(*extra_start);

  OptimResult best;
  bool any_converged = false;
  for (const auto& x0 : starts) {
    OptimResult r = bfgs_minimize(std::cref(objective), x0, opts);
    any_converged = any_converged || r.converged;
    if (r.f < best.f) best = std::move(r);
  }
  if (!std::isfinite(best.f)) {
    throw NoConvergence("all optimizer starts failed to evaluate");
  }
  if (!any_converged) {
    throw NoConvergence("no start reached the gradient tolerance");
  }

  // Independence-consistent data leave a flat basin above the theta floor;
  // when the likelihood is still nonincreasing in theta there, report the
  // floor itself.
  if (best.x[npi] <= kLogThetaFloor + std::log(10.0) &&
      best.x[npi] > kLogThetaFloor) {
    std::vector<double> probe = best.x;
    probe[npi] = kLogThetaFloor;
    std::vector<double> g(n, 0.0);
    const double f_probe = objective(probe, g);
    if (std::isfinite(f_probe) && f_probe <= best.f && g[npi] >= 0.0) {
      double pg = 0.0;
      for (std::size_t i = 0; i < npi; ++i) pg = std::max(pg, std::abs(g[i]));
      if (pg <= 1e-6) {
        best.x = std::move(probe);
        best.f = f_probe;
        best.grad = std::move(g);
        best.grad_norm = pg;
        best.converged = true;
      }
    }
  }

  bool boundary = near(best.x[npi], kLogThetaFloor) ||
                  near(best.x[npi], kLogThetaCeil);
  for (std::size_t i = 0; i < npi; ++i) {
    if (std::abs(best.x[i]) >= logit(0.999)) boundary = true;
  }

  return FitResult{untransform(best.x, hypothesis),
                   -best.f,
                   best.converged,
                   best.grad_norm,
                   best.iterations,
                   static_cast<int>(starts.size()),
                   boundary};
}

}  // namespace

FitResult fit(const FrequencyTable& table, Hypothesis hypothesis) {
  if (hypothesis == Hypothesis::Alternative && table.num_groups() > 1) {
    return fit_pair(table).ha;
  }
  return fit_impl(table, hypothesis, nullptr);
}

FitPair fit_pair(const FrequencyTable& table) {
  FitResult h0 = fit_impl(table, Hypothesis::Null, nullptr);
  std::vector<double> embed(table.num_groups() + 1,
                            logit(h0.params_hat.pis.front().value()));
  embed.back() = std::log(h0.params_hat.theta.value());
  FitResult ha = fit_impl(table, Hypothesis::Alternative, &embed);
  return {std::move(h0), std::move(ha)};
}

}  // namespace bilat
