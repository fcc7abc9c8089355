#include "lpproj/sampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include <Eigen/QR>

#include "lpproj/errors.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

namespace {

void require_count(std::size_t count) {
  if (count == 0) {
    throw ArgumentError("sample count must be positive");
  }
}

double gamma_shape_at_least_one(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

}  // namespace

PExponent PExponent::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ArgumentError("p must be a finite real >= 1, got " + format_real(p));
  }
  PExponent e;
  e.infinite_ = false;
  e.value_ = p;
  return e;
}

PExponent PExponent::parse(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "inf" || t == "infinity" || t == "+inf") {
    return infinity();
  }
  return finite(parse_real(text, "p"));
}

double PExponent::value() const {
  if (infinite_) {
    throw ArgumentError("p = infinity has no finite value");
  }
  return value_;
}

std::string PExponent::to_string() const {
  return infinite_ ? "inf" : format_real(value_);
}

std::string to_string(ScaleConvention conv) {
  return conv == ScaleConvention::UnitDensity ? "unit-density" : "paper-density";
}

ScaleConvention parse_convention(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "unit-density" || t == "unit" || t == "canonical") {
    return ScaleConvention::UnitDensity;
  }
  if (t == "paper-density" || t == "paper" || t == "paper-literal") {
    return ScaleConvention::PaperDensity;
  }
  throw ArgumentError("unknown scale convention '" + text + "'");
}

WSpec WSpec::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ArgumentError("Gamma shape must be positive, got " + format_real(shape));
  }
  return {Kind::Gamma, shape};
}

WSpec WSpec::parse(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "dirac0" || t == "dirac" || t == "cone") {
    return dirac0();
  }
  if (t == "exponential1" || t == "exponential" || t == "exp" || t == "uniform") {
    return exponential1();
  }
  for (const std::string prefix : {"gamma:", "gamma("}) {
    if (t.rfind(prefix, 0) == 0) {
      std::string arg = t.substr(prefix.size());
      if (prefix.back() == '(') {
        if (arg.empty() || arg.back() != ')') {
          break;
        }
        arg.pop_back();
      }
      return gamma(parse_real(arg, "Gamma shape"));
    }
  }
  throw ArgumentError("unknown mixing distribution '" + text +
                      "' (expected dirac0, exponential1 or gamma:<shape>)");
}

std::string WSpec::to_string() const {
  switch (kind) {
    case Kind::Dirac0:
      return "dirac0";
    case Kind::Exponential1:
      return "exponential1";
    case Kind::Gamma:
      return "gamma:" + format_real(shape);
  }
  return "?";
}

double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) {
    throw ArgumentError("Gamma shape must be positive");
  }
  if (shape == 1.0) {
    return -std::log(rng.uniform_open());
  }
  if (shape < 1.0) {
    const double boosted = gamma_shape_at_least_one(shape + 1.0, rng);
    return boosted * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  return gamma_shape_at_least_one(shape, rng);
}

PGaussSampler::PGaussSampler(PExponent p, ScaleConvention conv) : p_(p), conv_(conv) {
  if (p_.is_finite()) {
    p_value_ = p_.value();
    inv_p_ = 1.0 / p_value_;
    power_scale_ = conv_ == ScaleConvention::PaperDensity ? p_value_ : 1.0;
  }
}

AbsPGaussDraw PGaussSampler::draw_abs(RngStream& rng) const {
  if (p_.is_infinite()) {
    return {rng.uniform(), 0.0};
  }
  const double g = power_scale_ * sample_gamma(inv_p_, rng);
  double abs_value;
  if (p_value_ == 1.0) {
    abs_value = g;
  } else if (p_value_ == 2.0) {
    abs_value = std::sqrt(g);
  } else {
    abs_value = std::pow(g, inv_p_);
  }
  return {abs_value, g};
}

double PGaussSampler::draw(RngStream& rng) const {
  if (p_.is_infinite()) {
    return 2.0 * rng.uniform() - 1.0;
  }
  const double magnitude = draw_abs(rng).abs_value;
  return rng.coin() ? -magnitude : magnitude;
}

std::vector<double> sample_pgauss(PExponent p, ScaleConvention conv, std::size_t count, RngStream& rng) {
  require_count(count);
  const PGaussSampler sampler(p, conv);
  std::vector<double> out(count);
  for (auto& x : out) {
    x = sampler.draw(rng);
  }
  return out;
}

double draw_w(const WSpec& w, RngStream& rng) {
  switch (w.kind) {
    case WSpec::Kind::Dirac0:
      return 0.0;
    case WSpec::Kind::Exponential1:
      return -std::log(rng.uniform_open());
    case WSpec::Kind::Gamma:
      return sample_gamma(w.shape, rng);
  }
  return 0.0;
}

std::vector<double> sample_w(const WSpec& w, std::size_t count, RngStream& rng) {
  require_count(count);
  std::vector<double> out(count);
  for (auto& x : out) {
    x = draw_w(w, rng);
  }
  return out;
}

Eigen::MatrixXd sample_haar_orthogonal(int n, RngStream& rng) {
  if (n < 1) {
    throw ArgumentError("matrix dimension must be positive");
  }
  Eigen::MatrixXd gaussian(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      gaussian(i, j) = rng.normal();
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  Eigen::MatrixXd q = qr.householderQ();
  const auto& packed = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (packed(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

}  // namespace lpproj
