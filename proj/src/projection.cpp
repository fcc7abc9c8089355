#include "lpproj/projection.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "lpproj/errors.hpp"
#include "lpproj/moments.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

namespace {

double chi_square(long dof, RngStream& rng) {
  return dof > 0 ? 2.0 * sample_gamma(0.5 * static_cast<double>(dof), rng) : 0.0;
}

double root_p(double x, double p) {
  if (p == 1.0) {
    return x;
  }
  if (p == 2.0) {
    return std::sqrt(x);
  }
  return std::pow(x, 1.0 / p);
}

}  // namespace

std::string to_string(ProjectionMethod m) {
  return m == ProjectionMethod::Representation ? "representation" : "direct-haar";
}

ProjectionMethod parse_projection_method(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "representation" || t == "repr") {
    return ProjectionMethod::Representation;
  }
  if (t == "direct-haar" || t == "directhaar" || t == "haar") {
    return ProjectionMethod::DirectHaar;
  }
  throw ArgumentError("unknown projection method '" + text + "'");
}

std::string to_string(StatisticKind kind) {
  return kind == StatisticKind::RawNorm ? "raw-norm" : "centered-x";
}

void ProjectionSpec::validate() const {
  ball().validate();
  if (k < 1 || k > n) {
    throw ArgumentError("subspace dimension k = " + std::to_string(k) + " must lie in [1, n = " +
                        std::to_string(n) + "]");
  }
}

ProjectionSampler::ProjectionSampler(const ProjectionSpec& spec) : spec_(spec), pgauss_(spec.p, spec.conv) {
  spec_.validate();
  if (spec_.method == ProjectionMethod::DirectHaar) {
    point_.resize(static_cast<std::size_t>(spec_.n));
  }
}

double ProjectionSampler::draw_raw(RngStream& rng) {
  return spec_.method == ProjectionMethod::Representation ? draw_representation(rng) : draw_direct(rng);
}

double ProjectionSampler::draw_representation(RngStream& rng) {
  const long n = spec_.n;
  double square_sum = 0.0;
  double power_sum = 0.0;
  if (spec_.p.is_infinite()) {
    CompensatedSum squares;
    for (long i = 0; i < n; ++i) {
      const double u = rng.uniform();
      squares += u * u;
    }
    square_sum = squares.value();
  } else if (spec_.p.value() == 2.0) {
    const double scale = spec_.conv == ScaleConvention::PaperDensity ? 2.0 : 1.0;
    square_sum = scale * sample_gamma(0.5 * static_cast<double>(n), rng);
    power_sum = square_sum;
  } else {
    CompensatedSum squares;
    CompensatedSum powers;
    for (long i = 0; i < n; ++i) {
      const AbsPGaussDraw d = pgauss_.draw_abs(rng);
      squares += d.abs_value * d.abs_value;
      powers += d.abs_pow_p;
    }
    square_sum = squares.value();
    power_sum = powers.value();
  }
  const double head = chi_square(spec_.k, rng);
  const double tail = chi_square(n - spec_.k, rng);
  const double gaussian_ratio = std::sqrt(head / (head + tail));
  if (spec_.p.is_infinite()) {
    return std::sqrt(square_sum) * gaussian_ratio;
  }
  const double w = draw_w(spec_.w, rng);
  return std::sqrt(square_sum) / root_p(power_sum + w, spec_.p.value()) * gaussian_ratio;
}

double ProjectionSampler::draw_direct(RngStream& rng) {
  draw_ball_point(spec_.ball(), pgauss_, rng, point_);
  const Eigen::MatrixXd q = sample_haar_orthogonal(static_cast<int>(spec_.n), rng);
  const Eigen::Map<const Eigen::VectorXd> x(point_.data(), spec_.n);
  return (q.leftCols(spec_.k).transpose() * x).norm();
}

double representation_norm(std::span<const double> z, double w, std::span<const double> g, long k, PExponent p) {
  const auto n = static_cast<long>(z.size());
  if (static_cast<long>(g.size()) != n || k < 1 || k > n) {
    throw ArgumentError("representation needs |z| = |g| = n and 1 <= k <= n");
  }
  CompensatedSum squares, powers, head, all;
  for (long i = 0; i < n; ++i) {
    squares += z[i] * z[i];
    if (p.is_finite()) {
      powers += std::pow(std::fabs(z[i]), p.value());
    }
    const double g2 = g[i] * g[i];
    all += g2;
    if (i < k) {
      head += g2;
    }
  }
  const double ratio = std::sqrt(head.value() / all.value());
  if (p.is_infinite()) {
    return std::sqrt(squares.value()) * ratio;
  }
  return std::sqrt(squares.value()) / root_p(powers.value() + w, p.value()) * ratio;
}

StatSampleBatch sample_projection_norm(const ProjectionSpec& spec, std::size_t count, RngStream& rng) {
  if (count == 0) {
    throw ArgumentError("sample count must be positive");
  }
  ProjectionSampler sampler(spec);
  StatSampleBatch batch{spec, StatisticKind::RawNorm, std::vector<double>(count), rng.provenance(), 1};
  for (auto& v : batch.values) {
    v = sampler.draw_raw(rng);
  }
  return batch;
}

StatSampleBatch sample_statistic(const ProjectionSpec& spec, StatisticKind kind, std::size_t count,
                                 const RngStream& root, const BatchPlan& plan) {
  spec.validate();
  if (count == 0) {
    throw ArgumentError("sample count must be positive");
  }
  const std::size_t streams = std::max<std::size_t>(1, plan.substreams);
  StatSampleBatch batch{spec, kind, std::vector<double>(count), root.provenance(), streams};
  std::vector<std::size_t> offsets(streams + 1, 0);
  for (std::size_t s = 0; s < streams; ++s) {
    offsets[s + 1] = offsets[s] + count / streams + (s < count % streams ? 1 : 0);
  }
  parallel_for(streams, plan.workers, [&](std::size_t s) {
    RngStream rng = root.split(s);
    ProjectionSampler sampler(spec);
    for (std::size_t i = offsets[s]; i < offsets[s + 1]; ++i) {
      const double raw = sampler.draw_raw(rng);
      batch.values[i] = kind == StatisticKind::RawNorm ? raw : statistic_x(spec, raw);
    }
  });
  return batch;
}

double statistic_x(const ProjectionSpec& spec, double raw_norm) {
  const double sqrt_k = std::sqrt(static_cast<double>(spec.k));
  if (spec.p.is_infinite()) {
    return std::sqrt(3.0) * raw_norm - sqrt_k;
  }
  const double pv = spec.p.value();
  const double n_root = root_p(static_cast<double>(spec.n), pv);
  return n_root * raw_norm / std::sqrt(abs_moment(spec.p, 2.0)) - sqrt_k;
}

std::vector<double> sample_linearized_y1(long n, long k, PExponent p, std::size_t count, RngStream& rng) {
  if (p.is_infinite()) {
    throw ArgumentError("linearized term is defined for finite p");
  }
  if (k < 1 || k > n) {
    throw ArgumentError("need 1 <= k <= n");
  }
  if (count == 0) {
    throw ArgumentError("sample count must be positive");
  }
  const double pv = p.value();
  const double m2 = abs_moment(p, 2.0);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double sqrt_lambda = std::sqrt(kd / nd);
  const PGaussSampler sampler(p, ScaleConvention::PaperDensity);
  std::vector<double> out(count);
  for (auto& y : out) {
    double square_sum, power_sum;
    if (pv == 2.0) {
      square_sum = 2.0 * sample_gamma(0.5 * nd, rng);
      power_sum = square_sum;
    } else {
      CompensatedSum squares, powers;
      for (long i = 0; i < n; ++i) {
        const AbsPGaussDraw d = sampler.draw_abs(rng);
        squares += d.abs_value * d.abs_value;
        powers += d.abs_pow_p;
      }
      square_sum = squares.value();
      power_sum = powers.value();
    }
    const double head = chi_square(k, rng);
    const double tail = chi_square(n - k, rng);
    const double xi1 = (square_sum - nd * m2) / std::sqrt(nd);
    const double xi2 = (power_sum - nd) / std::sqrt(nd);
    const double xi3 = (head - kd) / std::sqrt(kd);
    const double xi4 = (head + tail - nd) / std::sqrt(nd);
    y = sqrt_lambda * xi1 / (2.0 * m2) - sqrt_lambda * xi2 / pv + 0.5 * xi3 - 0.5 * sqrt_lambda * xi4;
  }
  return out;
}

}  // namespace lpproj
