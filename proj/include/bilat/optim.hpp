#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace bilat {

// Objective for minimization: returns f(x) and fills grad (same length as x).
// May return +inf to reject a trial point.
using Objective =
    std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct BfgsOptions {
  int max_iterations = 500;
  double grad_tol = 1e-6;  // max-norm of the (projected) gradient
  // Optional per-coordinate box; iterates are projected into it. Empty
  // vectors mean unbounded. Objective stagnation surfaces as line-search
  // exhaustion rather than a separate tolerance.
  std::vector<double> lower;
  std::vector<double> upper;
};

struct OptimResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  std::vector<double> grad;
  double grad_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;  // projected gradient reached grad_tol
};

// Quasi-Newton (BFGS) minimizer with backtracking line search and projection
// onto the box. Suited to the small, smooth problems this library fits.
OptimResult bfgs_minimize(const Objective& fn, std::vector<double> x0,
                          const BfgsOptions& opts = {});

}  // namespace bilat
