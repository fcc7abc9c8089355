#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lpproj/rng.hpp"

namespace lpproj {

/// Exponent p of an l_p norm: a real p >= 1 or infinity.
class PExponent {
 public:
  static PExponent finite(double p);
  static PExponent infinity() { return PExponent(); }
  /// Parses "inf"/"infinity" or a real number >= 1.
  static PExponent parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  /// The finite value; throws ArgumentError for p = infinity.
  double value() const;
  std::string to_string() const;

  friend bool operator==(const PExponent&, const PExponent&) = default;

 private:
  PExponent() = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

/// Density of a p-generalized Gaussian: PaperDensity ~ exp(-|x|^p / p),
/// UnitDensity ~ exp(-|x|^p).
enum class ScaleConvention { PaperDensity, UnitDensity };

std::string to_string(ScaleConvention conv);
ScaleConvention parse_convention(const std::string& text);

/// Mixing distribution W on [0, inf).
struct WSpec {
  enum class Kind { Dirac0, Exponential1, Gamma };

  Kind kind = Kind::Exponential1;
  double shape = 1.0;  // Gamma only

  static WSpec dirac0() { return {Kind::Dirac0, 0.0}; }
  static WSpec exponential1() { return {Kind::Exponential1, 1.0}; }
  static WSpec gamma(double shape);
  /// "dirac0", "exponential1", "gamma:<shape>" (also "gamma(<shape>)").
  static WSpec parse(const std::string& text);

  std::string to_string() const;
  friend bool operator==(const WSpec&, const WSpec&) = default;
};

/// Gamma(shape, scale 1) by Marsaglia-Tsang; shapes below one are boosted
/// through Gamma(shape + 1) * U^(1/shape).
double sample_gamma(double shape, RngStream& rng);

/// One |Z| draw with its p-th power, so callers never recompute pow().
struct AbsPGaussDraw {
  double abs_value;
  double abs_pow_p;
};

/// Per-(p, convention) sampler of generalized Gaussians via
/// Z = sign * (c * G)^(1/p), G ~ Gamma(1/p), c = p (PaperDensity) or 1.
/// For p = infinity the draws are Uniform[-1, 1].
class PGaussSampler {
 public:
  PGaussSampler(PExponent p, ScaleConvention conv);

  double draw(RngStream& rng) const;
  /// |Z| and |Z|^p; for p = infinity abs_pow_p is left at 0.
  AbsPGaussDraw draw_abs(RngStream& rng) const;

  PExponent p() const { return p_; }

 private:
  PExponent p_;
  ScaleConvention conv_;
  double p_value_ = 0.0;
  double inv_p_ = 0.0;
  double power_scale_ = 1.0;
};

std::vector<double> sample_pgauss(PExponent p, ScaleConvention conv, std::size_t count, RngStream& rng);

double draw_w(const WSpec& w, RngStream& rng);
std::vector<double> sample_w(const WSpec& w, std::size_t count, RngStream& rng);

/// Haar-distributed n x n orthogonal matrix: QR of a Gaussian matrix with the
/// columns of Q rescaled so that R has a positive diagonal.
Eigen::MatrixXd sample_haar_orthogonal(int n, RngStream& rng);

}  // namespace lpproj
