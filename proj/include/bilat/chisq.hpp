#pragma once

namespace bilat {

// Upper-tail probability of the chi-square distribution with df degrees of
// freedom: Q(df/2, x/2), the regularized upper incomplete gamma function.
double chisq_sf(double x, int df);

namespace detail {

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0, via the usual
// series / continued-fraction split around x = a + 1.
double gamma_q(double a, double x);

}  // namespace detail

}  // namespace bilat
