#pragma once

#include <map>
#include <vector>

#include "lpproj/sampling.hpp"

namespace lpproj {

/// M_p(q) = E|Z_p|^q for a p-generalized Gaussian with density ~ exp(-|x|^p / p);
/// M_inf(q) = 1 / (q + 1) for Uniform[-1, 1].
double abs_moment(PExponent p, double q);

/// Var |Z|^q = M_p(2q) - M_p(q)^2.
double abs_moment_variance(PExponent p, double q);
/// Cov(|Z|^q, |Z|^r) = M_p(q + r) - M_p(q) M_p(r).
double abs_moment_covariance(PExponent p, double q, double r);

/// Cached M_p(q) values for a fixed p. Construction checks M_p(0) = 1 and,
/// for finite p, M_p(p) = 1.
class MomentTable {
 public:
  MomentTable(PExponent p, const std::vector<double>& orders);

  PExponent p() const { return p_; }
  double at(double q) const;
  const std::map<double, double>& entries() const { return entries_; }

 private:
  PExponent p_;
  std::map<double, double> entries_;
};

/// How the limiting CLT variance sigma^2(p, lambda) is evaluated.
///  - MomentBased: lambda Var(Z-term) + (1 - lambda)/2 built from the absolute
///    moments; equals lambda M_p(4)/(4 M_p(2)^2) - lambda (3/4 + 1/p) + 1/2.
///  - PrintedClosedForm: (lambda/4) G(1/p)G(5/p)/G(3/p)^2 - lambda (3/4 - 1/p + 1/p^2) + 1/2.
/// Both give 1/2 - 3 lambda / 10 at p = infinity.
enum class VarianceVariant { MomentBased, PrintedClosedForm };

std::string to_string(VarianceVariant v);
VarianceVariant parse_variance_variant(const std::string& text);

double clt_variance(PExponent p, double lambda, VarianceVariant variant = VarianceVariant::MomentBased);

/// Prefactor reading of the LDP constant m_p = c_p/3 * G(1+3/p)/G(1+1/p):
/// AsPrinted uses c_p = p^(p/2), MomentConsistent uses c_p = p^(2/p) (so m_p = M_p(2)).
enum class MConstantVariant { AsPrinted, MomentConsistent };

std::string to_string(MConstantVariant v);
MConstantVariant parse_m_variant(const std::string& text);

double ldp_m_constant(PExponent p, MConstantVariant variant = MConstantVariant::AsPrinted);

/// Dilation making the uniform distribution on r * B_p^n isotropic:
/// sqrt(G(1/p) G(1 + (n+2)/p) / (G(3/p) G(1 + n/p))).
double isotropic_scale(long long n, PExponent p);

}  // namespace lpproj
