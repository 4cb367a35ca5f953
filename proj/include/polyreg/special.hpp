#pragma once

namespace polyreg {

// Standard normal cumulative distribution function.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Inverse of normal_cdf on (0,1).  Rational initial approximation refined by
// one Newton step; absolute error well below 1e-9 over the usable range.
double normal_quantile(double p);

// Regularized lower incomplete gamma function P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

}  // namespace polyreg
