#include "bilat/optim.hpp"

#include <algorithm>
#include <cmath>

namespace bilat {

namespace {

void project(std::vector<double>& x, const BfgsOptions& o) {
  if (!o.lower.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(x[i], o.lower[i]);
  }
  if (!o.upper.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::min(x[i], o.upper[i]);
  }
}

bool at_lower(const std::vector<double>& x, const BfgsOptions& o,
              std::size_t i) {
  return !o.lower.empty() && x[i] <= o.lower[i];
}

bool at_upper(const std::vector<double>& x, const BfgsOptions& o,
              std::size_t i) {
  return !o.upper.empty() && x[i] >= o.upper[i];
}

// Gradient with outward components zeroed at active bounds; its max-norm is
// the stationarity measure on the box.
double projected_grad_norm(const std::vector<double>& x,
                           const std::vector<double>& g,
                           const BfgsOptions& o) {
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (at_lower(x, o, i) && gi > 0.0) gi = 0.0;
    if (at_upper(x, o, i) && gi < 0.0) gi = 0.0;
    norm = std::max(norm, std::abs(gi));
  }
  return norm;
}

}  // namespace

// Gradient-projection BFGS: coordinates pinned at a bound with an outward
// gradient are frozen for a round, BFGS runs on the free subspace, and the
// active set is re-examined between rounds.
OptimResult bfgs_minimize(const Objective& fn, std::vector<double> x0,
                          const BfgsOptions& opts) {
  const std::size_t n = x0.size();
  OptimResult res;
  project(x0, opts);
  res.x = x0;
  res.grad.assign(n, 0.0);
  res.f = fn(res.x, res.grad);
  res.grad_norm = projected_grad_norm(res.x, res.grad, opts);
  if (!std::isfinite(res.f)) return res;

  std::vector<double> h(n * n, 0.0);
  std::vector<char> frozen(n, 0);
  std::vector<double> dir(n), x_new(n), g_new(n), s(n), y(n), hy(n);
  constexpr double c1 = 1e-4;  // Armijo slope fraction

  auto reset_h = [&](double scale) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
  };
  auto masked = [&](std::vector<double> g) {
    for (std::size_t i = 0; i < n; ++i) {
      if (frozen[i]) g[i] = 0.0;
    }
    return g;
  };

  int iter = 0;
  for (int round = 0; round < 4 && iter < opts.max_iterations; ++round) {
    bool any_free = false;
    for (std::size_t i = 0; i < n; ++i) {
      frozen[i] = (at_lower(res.x, opts, i) && res.grad[i] > 0.0) ||
                  (at_upper(res.x, opts, i) && res.grad[i] < 0.0);
      any_free = any_free || !frozen[i];
    }
    if (!any_free) break;

    std::vector<double> g = masked(res.grad);
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::abs(v));
    reset_h(gnorm > 1.0 ? 1.0 / gnorm : 1.0);
    bool h_is_fresh = true;
    bool active_set_changed = false;

    while (iter < opts.max_iterations) {
      ++iter;
      res.iterations = iter;
      if (res.grad_norm <= opts.grad_tol) {
        res.converged = true;
        return res;
      }

      for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d -= h[i * n + j] * g[j];
        dir[i] = frozen[i] ? 0.0 : d;
      }
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
      if (!(slope < 0.0) || !std::isfinite(slope)) {
        reset_h(1.0);
        h_is_fresh = true;
        for (std::size_t i = 0; i < n; ++i) dir[i] = frozen[i] ? 0.0 : -g[i];
        slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
        if (slope == 0.0) break;  // flat in the free subspace
      }

      double step = 1.0;
      double f_new = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * dir[i];
        project(x_new, opts);
        f_new = fn(x_new, g_new);
        if (std::isfinite(f_new) && f_new <= res.f + c1 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // stalled in this subspace

      for (std::size_t i = 0; i < n; ++i) {
        s[i] = x_new[i] - res.x[i];
        y[i] = g_new[i] - res.grad[i];
        if (frozen[i]) y[i] = 0.0;
      }

      // A free coordinate ran into a bound: the curvature pair is unusable
      // and the active set needs re-examination.
      for (std::size_t i = 0; i < n; ++i) {
        if (!frozen[i] &&
            ((at_lower(x_new, opts, i) && !at_lower(res.x, opts, i)) ||
             (at_upper(x_new, opts, i) && !at_upper(res.x, opts, i)))) {
          active_set_changed = true;
        }
      }

      res.x = x_new;
      res.f = f_new;
      res.grad = g_new;
      res.grad_norm = projected_grad_norm(res.x, res.grad, opts);
      g = masked(res.grad);
      if (res.grad_norm <= opts.grad_tol) {
        res.converged = true;
        return res;
      }
      if (active_set_changed) break;

      double sy = 0.0, yy = 0.0, snorm = 0.0, ynorm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sy += s[i] * y[i];
        yy += y[i] * y[i];
        snorm = std::max(snorm, std::abs(s[i]));
        ynorm = std::max(ynorm, std::abs(y[i]));
      }
      if (!(sy > 1e-12 * snorm * ynorm) || !std::isfinite(sy)) continue;
      if (h_is_fresh && yy > 0.0) {
        reset_h(sy / yy);
        h_is_fresh = false;
      }

      // H <- (I - s y^T / sy) H (I - y s^T / sy) + s s^T / sy
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * y[j];
        hy[i] = acc;
      }
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) +
                          rho * (1.0 + rho * yhy) * s[i] * s[j];
        }
      }
    }

    if (!active_set_changed) {
      // The subspace stalled without touching a new bound; another round
      // with the same active set would repeat itself.
      bool mask_would_change = false;
      for (std::size_t i = 0; i < n; ++i) {
        const bool pin = (at_lower(res.x, opts, i) && res.grad[i] > 0.0) ||
                         (at_upper(res.x, opts, i) && res.grad[i] < 0.0);
        if (pin != static_cast<bool>(frozen[i])) mask_would_change = true;
      }
      if (!mask_would_change) return res;
    }
  }
  if (res.grad_norm <= opts.grad_tol) res.converged = true;
  return res;
}

}  // namespace bilat
