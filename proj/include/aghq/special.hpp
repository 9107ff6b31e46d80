#ifndef AGHQ_SPECIAL_HPP
#define AGHQ_SPECIAL_HPP

namespace aghq {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, via erfc.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS 241, ~1e-15 relative accuracy).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x), series / continued fraction.
double gamma_p(double a, double x);

/// Quantile of Gamma(shape, rate): smallest x with P(shape, rate*x) >= p,
/// located by bisection.
double gamma_quantile(double p, double shape, double rate);

/// (a-1)!! for even a >= 0, i.e. the a-th moment of a standard normal.
/// Odd a returns 0.
double gaussian_moment(int a);

}  // namespace aghq

#endif
