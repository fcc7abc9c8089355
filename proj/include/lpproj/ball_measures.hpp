#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "lpproj/rng.hpp"
#include "lpproj/sampling.hpp"

namespace lpproj {

/// Measure P_{n,p,W} on B_p^n, sampled as X = Z / (||Z||_p^p + W)^(1/p).
///
/// The canonical convention draws Z with UnitDensity, under which ||X||_p^p
/// is Beta(n/p, alpha) for Gamma(alpha, 1) mixing (uniform for alpha = 1).
/// PaperDensity with unscaled W is the literal pairing; it amounts to using
/// W / p instead of W. For p = infinity only the uniform cube is defined and
/// w must be Exponential1.
struct BallMeasureSpec {
  long n = 1;
  PExponent p = PExponent::finite(2.0);
  WSpec w = WSpec::exponential1();
  ScaleConvention conv = ScaleConvention::UnitDensity;

  void validate() const;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BallPointBatch {
  BallMeasureSpec spec;
  RowMatrix points;  // count x n
  Provenance provenance;
};

/// Writes one P_{n,p,W} point into `out` (size n).
void draw_ball_point(const BallMeasureSpec& spec, const PGaussSampler& sampler, RngStream& rng,
                     std::span<double> out);

BallPointBatch sample_ball_point(const BallMeasureSpec& spec, std::size_t count, RngStream& rng);

double lp_norm(std::span<const double> x, PExponent p);

/// P(||X||_p <= r) for the beta-type measure with Gamma(alpha, 1) mixing:
/// I_{r^p}(n/p, alpha). alpha = 1 is the uniform distribution (r^n).
double radial_pnorm_cdf(long n, PExponent p, double alpha, double r);

/// Closest r to the pole at 1 where mixture_density_h is evaluated.
inline constexpr double kMixtureDensityMaxRadius = 1.0 - 1e-9;

/// Radial factor h(r) of the density of P_{n,p,W} relative to the uniform
/// distribution: h = 1 for Exponential1, 0 for Dirac0, and
/// G(n/p + alpha) / (G(alpha) G(1 + n/p)) (1 - r^p)^(alpha - 1) for Gamma(alpha).
double mixture_density_h(double r, long n, PExponent p, const WSpec& w);

}  // namespace lpproj
