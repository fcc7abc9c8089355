#include "lpproj/moments.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "lpproj/errors.hpp"
#include "lpproj/special.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

namespace {

double log_abs_moment(double p, double q) {
  CompensatedSum log_value;
  log_value += (q / p) * std::log(p);
  log_value += special::log_gamma(1.0 + (q + 1.0) / p);
  log_value += -special::log_gamma(1.0 + 1.0 / p);
  log_value += -std::log1p(q);
  return log_value.value();
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ArgumentError("lambda must lie in [0, 1], got " + format_real(lambda));
  }
}

}  // namespace

double abs_moment(PExponent p, double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw ArgumentError("moment order must be a finite q >= 0, got " + format_real(q));
  }
  if (q == 0.0) {
    return 1.0;
  }
  if (p.is_infinite()) {
    return 1.0 / (q + 1.0);
  }
  return std::exp(log_abs_moment(p.value(), q));
}

double abs_moment_variance(PExponent p, double q) {
  const double m = abs_moment(p, q);
  return abs_moment(p, 2.0 * q) - m * m;
}

double abs_moment_covariance(PExponent p, double q, double r) {
  return abs_moment(p, q + r) - abs_moment(p, q) * abs_moment(p, r);
}

MomentTable::MomentTable(PExponent p, const std::vector<double>& orders) : p_(p) {
  entries_[0.0] = abs_moment(p, 0.0);
  for (double q : orders) {
    entries_[q] = abs_moment(p, q);
  }
  if (p.is_finite()) {
    const double at_p = abs_moment(p, p.value());
    if (std::fabs(at_p - 1.0) > 1e-12) {
      throw PreconditionError("M_p(p) != 1 for p = " + p.to_string());
    }
    entries_[p.value()] = at_p;
  }
  if (entries_.at(0.0) != 1.0) {
    throw PreconditionError("M_p(0) != 1");
  }
}

double MomentTable::at(double q) const {
  const auto it = entries_.find(q);
  if (it == entries_.end()) {
    throw ArgumentError("moment order " + format_real(q) + " not in table");
  }
  return it->second;
}

std::string to_string(VarianceVariant v) {
  return v == VarianceVariant::MomentBased ? "moment-based" : "printed-closed-form";
}

VarianceVariant parse_variance_variant(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "moment-based" || t == "momentbased" || t == "moment") {
    return VarianceVariant::MomentBased;
  }
  if (t == "printed-closed-form" || t == "printedclosedform" || t == "printed") {
    return VarianceVariant::PrintedClosedForm;
  }
  throw ArgumentError("unknown variance variant '" + text + "'");
}

double clt_variance(PExponent p, double lambda, VarianceVariant variant) {
  require_lambda(lambda);
  if (p.is_infinite()) {
    return 0.5 - 0.3 * lambda;
  }
  const double pv = p.value();
  const double shift = 0.75 - 1.0 / pv + 1.0 / (pv * pv);
  if (variant == VarianceVariant::PrintedClosedForm) {
    const double log_ratio = special::log_gamma(1.0 / pv) + special::log_gamma(5.0 / pv) -
                             2.0 * special::log_gamma(3.0 / pv);
    return 0.25 * lambda * std::exp(log_ratio) - lambda * shift + 0.5;
  }
  const double m2 = abs_moment(p, 2.0);
  const double bracket = abs_moment(p, 4.0) / (4.0 * m2 * m2) + abs_moment(p, 2.0 * pv) / (pv * pv) -
                         abs_moment(p, pv + 2.0) / (pv * m2);
  return lambda * bracket - lambda * shift + 0.5;
}

std::string to_string(MConstantVariant v) {
  return v == MConstantVariant::AsPrinted ? "as-printed" : "moment-consistent";
}

MConstantVariant parse_m_variant(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "as-printed" || t == "asprinted" || t == "printed") {
    return MConstantVariant::AsPrinted;
  }
  if (t == "moment-consistent" || t == "momentconsistent" || t == "moment") {
    return MConstantVariant::MomentConsistent;
  }
  throw ArgumentError("unknown m-constant variant '" + text + "'");
}

double ldp_m_constant(PExponent p, MConstantVariant variant) {
  const double pv = p.value();
  const double log_prefactor =
      (variant == MConstantVariant::AsPrinted ? pv / 2.0 : 2.0 / pv) * std::log(pv);
  return std::exp(log_prefactor + special::log_gamma(1.0 + 3.0 / pv) - special::log_gamma(1.0 + 1.0 / pv)) / 3.0;
}

double isotropic_scale(long long n, PExponent p) {
  if (n < 1) {
    throw ArgumentError("dimension must be positive");
  }
  const double pv = p.value();
  const double nd = static_cast<double>(n);
  // G(1 + (n+2)/p) / G(1 + n/p) as a delta ratio keeps full precision for huge n.
  const double log_growth = -std::log(boost::math::tgamma_delta_ratio(1.0 + nd / pv, 2.0 / pv));
  CompensatedSum log_square;
  log_square += special::log_gamma(1.0 / pv);
  log_square += -special::log_gamma(3.0 / pv);
  log_square += log_growth;
  return std::exp(0.5 * log_square.value());
}

}  // namespace lpproj
