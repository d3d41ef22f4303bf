#pragma once

// Distribution tails and quantiles used by the test statistics: Fisher F and
// chi-square upper tails via the regularized incomplete beta/gamma functions,
// plus the standard normal quantile for inverse-CDF sampling.

namespace flt {

// Regularized incomplete beta I_x(a,b), continued fraction (modified Lentz),
// symmetry switch at x = (a+1)/(a+b+2). Absolute accuracy ~1e-14 for
// moderate (a,b), ~1e-10 once lgamma cancellation dominates.
double regularized_incomplete_beta(double x, double a, double b);

// Regularized incomplete gamma: P(a,x) lower, Q(a,x) = 1 - P(a,x) upper.
// Series for x < a+1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// P(F(k,m) >= x). Throws std::domain_error on x < 0 or k,m < 1.
double fisher_upper_tail(double x, int k, int m);

// Inverse of fisher_upper_tail in x: the value with P(F(k,m) >= x) = alpha.
// Bracketed bisection refined by safeguarded Newton; |tail(x)-alpha| well
// below 1e-9. Throws std::domain_error on alpha outside (0,1).
double fisher_upper_quantile(double alpha, int k, int m);

// P(chi2(k) >= x).
double chi2_upper_tail(double x, int k);

// Standard normal CDF and its inverse (Wichura's AS 241, double precision).
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace flt
