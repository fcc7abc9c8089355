#pragma once

namespace lpproj::special {

double log_gamma(double x);
/// Standard normal distribution function.
double normal_cdf(double x);
/// P(a, x) = gamma(a, x) / Gamma(a).
double regularized_lower_gamma(double a, double x);
/// I_x(a, b), the Beta(a, b) distribution function.
double regularized_incomplete_beta(double a, double b, double x);

/// Limiting Kolmogorov survival function Q(t) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 t^2).
double kolmogorov_survival(double t);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_survival(double x, double dof);

}  // namespace lpproj::special
