#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpproj/moments.hpp"
#include "lpproj/projection.hpp"
#include "lpproj/sampling.hpp"

namespace lpproj {

/// Right-continuous step function F(t) = #{x_i <= t} / N of a nonempty sample.
class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::span<const double> samples);

  double operator()(double t) const;
  const std::vector<double>& sorted_values() const { return sorted_; }
  std::size_t count() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

EmpiricalCDF empirical_cdf(std::span<const double> samples);

using CdfFunction = std::function<double(double)>;

/// Exact sup_t |F_N(t) - G(t)| evaluated at the jump points of F_N.
double kolmogorov_distance(const EmpiricalCDF& ecdf, const CdfFunction& target);

struct KsTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool passes(double alpha) const { return p_value >= alpha; }
};

/// One-sample Kolmogorov test against a continuous distribution function.
KsTestResult ks_test(std::span<const double> samples, const CdfFunction& target);
/// Two-sample Kolmogorov-Smirnov test.
KsTestResult ks_test_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square test of equal cell probabilities.
ChiSquareResult chi_square_uniform(std::span<const std::size_t> counts);

/// Limit distribution of the centered statistic.
struct LimitLaw {
  enum class Kind { Gaussian, FixedKChi, PointMass };
  Kind kind = Kind::Gaussian;
  double sigma2 = 0.5;  // Gaussian
  long k = 1;           // FixedKChi

  static LimitLaw gaussian(double sigma2);
  static LimitLaw fixed_k_chi(long k);
  static LimitLaw point_mass() { return {Kind::PointMass, 0.0, 0}; }
  std::string to_string() const;
};

/// Half-width of the window around 0 whose samples count as the atom of the
/// point mass when a study measures its distance to a degenerate limit.
inline constexpr double kPointMassTolerance = 1e-9;
/// Variances below this are treated as a degenerate (point mass) limit.
inline constexpr double kDegenerateVariance = 1e-12;

/// Gaussian: Phi(t / sigma). FixedKChi: P(sqrt(chi2_k) - sqrt(k) <= t).
/// PointMass: 1 for t >= 0.
double limit_cdf(const LimitLaw& law, double t);

/// max{log k / sqrt k, n / k^(3/2), |k/n - lambda|}.
double berry_esseen_envelope(long n, long k, double lambda);

/// Subspace dimension as a function of n.
struct KRule {
  enum class Kind { Lambda, Full, Power, Constant };
  Kind kind = Kind::Lambda;
  double value = 0.0;  // exponent (Power) or k (Constant)

  /// "lambda" (ceil(lambda n)), "n", "n^<gamma>", "const:<k>" or a bare integer.
  static KRule parse(const std::string& text);
  std::string to_string() const;
  long k_for(long n, double lambda) const;
  /// lim k/n for the rule (lambda for Lambda, 1 for Full and for n^1, else 0).
  double limit_lambda(double lambda) const;
};

/// Which lambda enters the Gaussian target of a cell.
enum class LambdaMode {
  Limit,  // lim k_n / n of the k-rule
  Cell,   // finite-n ratio k / n
};

std::string to_string(LambdaMode mode);
LambdaMode parse_lambda_mode(const std::string& text);

struct CltStudySpec {
  PExponent p = PExponent::finite(2.0);
  WSpec w = WSpec::exponential1();
  double lambda = 0.5;
  KRule k_rule;
  LambdaMode lambda_mode = LambdaMode::Limit;
  std::vector<long> n_grid;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t substreams = 4;
  VarianceVariant variant = VarianceVariant::MomentBased;
  ScaleConvention conv = ScaleConvention::UnitDensity;
  ProjectionMethod method = ProjectionMethod::Representation;
};

struct ConvergenceCell {
  long n = 0;
  long k = 0;
  std::size_t samples = 0;
  double lambda_target = 0.0;
  double sigma2 = 0.0;
  LimitLaw target;
  bool degenerate = false;
  double ks = 0.0;
  double envelope = 0.0;
  std::uint64_t stream_id = 0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  CltStudySpec spec;
  std::vector<ConvergenceCell> cells;
  bool any_degenerate() const;
  /// Smallest C with ks <= C * envelope on every cell.
  double fitted_envelope_constant() const;
};

/// Runs every grid cell: samples the centered statistic, measures the
/// Kolmogorov distance to the limit law and records the envelope. Deterministic
/// in (spec, seed); cell i draws from RngStream(seed).split(i).
ConvergenceReport run_clt_study(const CltStudySpec& spec);

}  // namespace lpproj
