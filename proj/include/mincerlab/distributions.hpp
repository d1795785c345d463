#pragma once

namespace mincer {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma function P(a, x).
double incomplete_gamma_p(double a, double x);

/// Student-t cumulative distribution function with df degrees of freedom.
double t_cdf(double x, int df);

/// Chi-squared cumulative distribution function with df degrees of freedom.
double chi2_cdf(double x, int df);

/// Two-sided p-value for a t statistic.
double t_two_sided_p(double t, int df);

}  // namespace mincer
