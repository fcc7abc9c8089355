#include "lpproj/special.hpp"

#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace lpproj::special {

double log_gamma(double x) {
  return boost::math::lgamma(x);
}

double normal_cdf(double x) {
  return 0.5 * boost::math::erfc(-x / std::sqrt(2.0));
}

double regularized_lower_gamma(double a, double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  return boost::math::gamma_p(a, x);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  if (x >= 1.0) {
    return 1.0;
  }
  return boost::math::ibeta(a, b, x);
}

double kolmogorov_survival(double t) {
  if (t <= 0.0) {
    return 1.0;
  }
  if (t < 0.2) {
    // Alternating series converges badly here; use the theta-function form of
    // the distribution function, 1 - Q(t) = sqrt(2 pi)/t sum exp(-(2j-1)^2 pi^2 / (8 t^2)).
    const double pi = 3.14159265358979323846;
    double cdf = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double odd = 2.0 * j - 1.0;
      cdf += std::exp(-odd * odd * pi * pi / (8.0 * t * t));
    }
    return 1.0 - std::sqrt(2.0 * pi) / t * cdf;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += sign * term;
    if (term < 1e-18) {
      break;
    }
    sign = -sign;
  }
  const double q = 2.0 * sum;
  return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

double chi_square_survival(double x, double dof) {
  if (x <= 0.0) {
    return 1.0;
  }
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

}  // namespace lpproj::special
