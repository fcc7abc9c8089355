#include "lpproj/fluctuation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lpproj/errors.hpp"
#include "lpproj/special.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

EmpiricalCDF::EmpiricalCDF(std::span<const double> samples) : sorted_(samples.begin(), samples.end()) {
  if (sorted_.empty()) {
    throw ArgumentError("empirical CDF needs at least one sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCDF empirical_cdf(std::span<const double> samples) {
  return EmpiricalCDF(samples);
}

double kolmogorov_distance(const EmpiricalCDF& ecdf, const CdfFunction& target) {
  const auto& xs = ecdf.sorted_values();
  const double n = static_cast<double>(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) {
      ++j;
    }
    // left limits on both sides so step targets are compared correctly
    const double g_left = target(std::nextafter(xs[i], -INFINITY));
    const double g = target(xs[i]);
    sup = std::max({sup, std::fabs(static_cast<double>(i) / n - g_left), std::fabs(static_cast<double>(j) / n - g)});
    i = j;
  }
  return std::min(sup, 1.0);
}

namespace {

double kolmogorov_p_value(double statistic, double effective_n) {
  const double root = std::sqrt(effective_n);
  // Stephens' small-sample correction of the asymptotic law.
  return special::kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic);
}

}  // namespace

KsTestResult ks_test(std::span<const double> samples, const CdfFunction& target) {
  const EmpiricalCDF ecdf(samples);
  const double d = kolmogorov_distance(ecdf, target);
  return {d, kolmogorov_p_value(d, static_cast<double>(samples.size()))};
}

KsTestResult ks_test_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ArgumentError("two-sample test needs nonempty samples");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return {d, kolmogorov_p_value(d, nx * ny / (nx + ny))};
}

ChiSquareResult chi_square_uniform(std::span<const std::size_t> counts) {
  if (counts.size() < 2) {
    throw ArgumentError("chi-square test needs at least two cells");
  }
  double total = 0.0;
  for (auto c : counts) {
    total += static_cast<double>(c);
  }
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return {stat, special::chi_square_survival(stat, static_cast<double>(counts.size() - 1))};
}

LimitLaw LimitLaw::gaussian(double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw ArgumentError("Gaussian limit needs a positive variance, got " + format_real(sigma2));
  }
  return {Kind::Gaussian, sigma2, 0};
}

LimitLaw LimitLaw::fixed_k_chi(long k) {
  if (k < 1) {
    throw ArgumentError("chi limit needs k >= 1");
  }
  return {Kind::FixedKChi, 0.0, k};
}

std::string LimitLaw::to_string() const {
  switch (kind) {
    case Kind::Gaussian:
      return "gaussian:" + format_real(sigma2);
    case Kind::FixedKChi:
      return "chi:" + std::to_string(k);
    case Kind::PointMass:
      return "point-mass:0";
  }
  return "?";
}

double limit_cdf(const LimitLaw& law, double t) {
  switch (law.kind) {
    case LimitLaw::Kind::Gaussian:
      return special::normal_cdf(t / std::sqrt(law.sigma2));
    case LimitLaw::Kind::FixedKChi: {
      const double root_k = std::sqrt(static_cast<double>(law.k));
      if (t < -root_k) {
        return 0.0;
      }
      const double r = t + root_k;
      return special::regularized_lower_gamma(0.5 * static_cast<double>(law.k), 0.5 * r * r);
    }
    case LimitLaw::Kind::PointMass:
      return t >= 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double berry_esseen_envelope(long n, long k, double lambda) {
  if (n < 2 || k < 1 || k > n) {
    throw ArgumentError("envelope needs n >= 2 and 1 <= k <= n");
  }
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const double log_term = std::log(kd) / std::sqrt(kd);
  const double dimension_term = nd / std::pow(kd, 1.5);
  const double ratio_term = std::fabs(kd / nd - lambda);
  return std::max({log_term, dimension_term, ratio_term});
}

KRule KRule::parse(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "lambda" || t == "ceil(lambda*n)" || t == "lambda*n") {
    return {Kind::Lambda, 0.0};
  }
  if (t == "n") {
    return {Kind::Full, 1.0};
  }
  if (t.rfind("n^", 0) == 0) {
    const double gamma = parse_real(t.substr(2), "k-rule exponent");
    if (!(gamma > 0.0 && gamma <= 1.0)) {
      throw ArgumentError("k-rule exponent must lie in (0, 1], got " + t.substr(2));
    }
    return {Kind::Power, gamma};
  }
  std::string digits = t.rfind("const:", 0) == 0 ? t.substr(6) : t;
  if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const double k = parse_real(digits, "constant k");
    if (k < 1) {
      throw ArgumentError("constant k-rule needs k >= 1");
    }
    return {Kind::Constant, k};
  }
  throw ArgumentError("unknown k-rule '" + text + "' (expected lambda, n, n^<gamma>, const:<k>)");
}

std::string KRule::to_string() const {
  switch (kind) {
    case Kind::Lambda:
      return "lambda";
    case Kind::Full:
      return "n";
    case Kind::Power:
      return "n^" + format_real(value);
    case Kind::Constant:
      return "const:" + format_real(value);
  }
  return "?";
}

long KRule::k_for(long n, double lambda) const {
  const double nd = static_cast<double>(n);
  // Round-off guard: 1024^0.8 must give 256, not 257.
  auto ceil_guarded = [](double x) { return static_cast<long>(std::ceil(x - 1e-9 * std::max(1.0, x))); };
  switch (kind) {
    case Kind::Lambda:
      return std::max(1L, ceil_guarded(lambda * nd));
    case Kind::Full:
      return n;
    case Kind::Power:
      return std::max(1L, ceil_guarded(std::pow(nd, value)));
    case Kind::Constant:
      return static_cast<long>(value);
  }
  return 1;
}

double KRule::limit_lambda(double lambda) const {
  switch (kind) {
    case Kind::Lambda:
      return lambda;
    case Kind::Full:
      return 1.0;
    case Kind::Power:
      return value >= 1.0 ? 1.0 : 0.0;
    case Kind::Constant:
      return 0.0;
  }
  return lambda;
}

std::string to_string(LambdaMode mode) {
  return mode == LambdaMode::Limit ? "limit" : "cell";
}

LambdaMode parse_lambda_mode(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "limit") {
    return LambdaMode::Limit;
  }
  if (t == "cell") {
    return LambdaMode::Cell;
  }
  throw ArgumentError("unknown lambda mode '" + text + "' (expected limit or cell)");
}

bool ConvergenceReport::any_degenerate() const {
  return std::any_of(cells.begin(), cells.end(), [](const ConvergenceCell& c) { return c.degenerate; });
}

double ConvergenceReport::fitted_envelope_constant() const {
  double c = 0.0;
  for (const auto& cell : cells) {
    c = std::max(c, cell.ks / cell.envelope);
  }
  return c;
}

ConvergenceReport run_clt_study(const CltStudySpec& spec) {
  if (spec.n_grid.empty()) {
    throw ConfigError("n_grid", "empty n-grid");
  }
  ConvergenceReport report{spec, {}};
  const RngStream root(spec.seed);
  for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
    const long n = spec.n_grid[i];
    const long k = spec.k_rule.k_for(n, spec.lambda);
    if (n < 2 || k < 1 || k > n) {
      throw ConfigError("k_rule", "cell " + std::to_string(i) + " (n = " + std::to_string(n) +
                                      "): k = " + std::to_string(k) + " infeasible, need 1 <= k <= n");
    }
    ConvergenceCell cell;
    cell.n = n;
    cell.k = k;
    cell.samples = spec.samples;
    cell.lambda_target = spec.lambda_mode == LambdaMode::Cell
                             ? static_cast<double>(k) / static_cast<double>(n)
                             : spec.k_rule.limit_lambda(spec.lambda);
    if (spec.k_rule.kind == KRule::Kind::Constant) {
      cell.target = LimitLaw::fixed_k_chi(k);
    } else {
      cell.sigma2 = clt_variance(spec.p, cell.lambda_target, spec.variant);
      if (cell.sigma2 < kDegenerateVariance) {
        cell.degenerate = true;
        cell.target = LimitLaw::point_mass();
      } else {
        cell.target = LimitLaw::gaussian(cell.sigma2);
      }
    }
    cell.envelope = berry_esseen_envelope(n, k, cell.lambda_target);

    const auto start = std::chrono::steady_clock::now();
    const ProjectionSpec pspec{n, k, spec.p, spec.w, spec.method, spec.conv};
    const RngStream cell_stream = root.split(i);
    cell.stream_id = cell_stream.stream_id();
    const StatSampleBatch batch = sample_statistic(pspec, StatisticKind::CenteredX, spec.samples, cell_stream,
                                                   BatchPlan{spec.substreams, spec.workers});
    const LimitLaw target = cell.target;
    std::vector<double> values = batch.values;
    if (target.kind == LimitLaw::Kind::PointMass) {
      // rounding noise around the atom is part of the atom
      for (double& v : values) {
        if (std::abs(v) <= kPointMassTolerance) {
          v = 0.0;
        }
      }
    }
    cell.ks = kolmogorov_distance(EmpiricalCDF(values), [&](double t) { return limit_cdf(target, t); });
    cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.cells.push_back(cell);
  }
  return report;
}

}  // namespace lpproj
