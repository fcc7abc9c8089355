#include "lpproj/ball_measures.hpp"

#include <algorithm>
#include <cmath>

#include "lpproj/errors.hpp"
#include "lpproj/special.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

void BallMeasureSpec::validate() const {
  if (n < 1) {
    throw ArgumentError("ball dimension n must be positive");
  }
  if (p.is_infinite() && w.kind != WSpec::Kind::Exponential1) {
    throw ArgumentError("p = inf supports only the uniform cube (w = exponential1), got w = " + w.to_string());
  }
}

void draw_ball_point(const BallMeasureSpec& spec, const PGaussSampler& sampler, RngStream& rng,
                     std::span<double> out) {
  if (spec.p.is_infinite()) {
    for (auto& x : out) {
      x = rng.uniform(-1.0, 1.0);
    }
    return;
  }
  CompensatedSum power_sum;
  for (auto& x : out) {
    const AbsPGaussDraw d = sampler.draw_abs(rng);
    x = rng.coin() ? -d.abs_value : d.abs_value;
    power_sum += d.abs_pow_p;
  }
  const double w = draw_w(spec.w, rng);
  const double pv = spec.p.value();
  const double total = power_sum.value() + w;
  const double scale = pv == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / pv);
  for (auto& x : out) {
    x /= scale;
  }
}

BallPointBatch sample_ball_point(const BallMeasureSpec& spec, std::size_t count, RngStream& rng) {
  spec.validate();
  if (count == 0) {
    throw ArgumentError("sample count must be positive");
  }
  BallPointBatch batch{spec, RowMatrix(static_cast<Eigen::Index>(count), spec.n), rng.provenance()};
  const PGaussSampler sampler(spec.p, spec.conv);
  for (Eigen::Index i = 0; i < batch.points.rows(); ++i) {
    draw_ball_point(spec, sampler, rng, std::span<double>(batch.points.row(i).data(), static_cast<std::size_t>(spec.n)));
  }
  return batch;
}

double lp_norm(std::span<const double> x, PExponent p) {
  if (p.is_infinite()) {
    double m = 0.0;
    for (double v : x) {
      m = std::max(m, std::fabs(v));
    }
    return m;
  }
  const double pv = p.value();
  CompensatedSum sum;
  for (double v : x) {
    sum += std::pow(std::fabs(v), pv);
  }
  return std::pow(sum.value(), 1.0 / pv);
}

double radial_pnorm_cdf(long n, PExponent p, double alpha, double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ArgumentError("radius must lie in [0, 1], got " + format_real(r));
  }
  if (n < 1 || !(alpha > 0.0)) {
    throw ArgumentError("radial law needs n >= 1 and alpha > 0");
  }
  const double pv = p.value();
  return special::regularized_incomplete_beta(static_cast<double>(n) / pv, alpha, std::pow(r, pv));
}

double mixture_density_h(double r, long n, PExponent p, const WSpec& w) {
  if (!(r >= 0.0)) {
    throw ArgumentError("radius must be nonnegative, got " + format_real(r));
  }
  if (r >= 1.0) {
    throw ArgumentError("h(r) has a pole at r = 1; got r = " + format_real(r));
  }
  if (r > kMixtureDensityMaxRadius) {
    throw ArgumentError("r = " + format_real(r) + " is within 1e-9 of the pole at r = 1");
  }
  if (n < 1) {
    throw ArgumentError("dimension must be positive");
  }
  switch (w.kind) {
    case WSpec::Kind::Dirac0:
      return 0.0;
    case WSpec::Kind::Exponential1:
      return 1.0;
    case WSpec::Kind::Gamma: {
      const double pv = p.value();
      const double dim_ratio = static_cast<double>(n) / pv;
      const double log_norm = special::log_gamma(dim_ratio + w.shape) - special::log_gamma(w.shape) -
                              special::log_gamma(1.0 + dim_ratio);
      const double log_radial = (w.shape - 1.0) * std::log1p(-std::pow(r, pv));
      return std::exp(log_norm + log_radial);
    }
  }
  return 0.0;
}

}  // namespace lpproj
