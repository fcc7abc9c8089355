#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lpproj/ball_measures.hpp"
#include "lpproj/rng.hpp"
#include "lpproj/sampling.hpp"

namespace lpproj {

enum class ProjectionMethod {
  /// ||P_E X||_2 = (sum Z_i^2)^(1/2) / (sum |Z_i|^p + W)^(1/p) * (sum_{i<=k} g_i^2 / sum_{i<=n} g_i^2)^(1/2)
  Representation,
  /// X ~ P_{n,p,W}, Q Haar on O(n), norm of the first k coordinates of Q^T X.
  DirectHaar,
};

std::string to_string(ProjectionMethod m);
ProjectionMethod parse_projection_method(const std::string& text);

struct ProjectionSpec {
  long n = 1;
  long k = 1;
  PExponent p = PExponent::finite(2.0);
  WSpec w = WSpec::exponential1();
  ProjectionMethod method = ProjectionMethod::Representation;
  ScaleConvention conv = ScaleConvention::UnitDensity;

  void validate() const;
  BallMeasureSpec ball() const { return {n, p, w, conv}; }
};

enum class StatisticKind { RawNorm, CenteredX };

std::string to_string(StatisticKind kind);

struct StatSampleBatch {
  ProjectionSpec spec;
  StatisticKind kind = StatisticKind::RawNorm;
  std::vector<double> values;
  Provenance provenance;
  std::size_t substreams = 1;
};

/// Substream layout of a batch. Substream s draws from root.split(s) and the
/// merged order is (s, index), so results depend on the substream count but
/// not on the number of worker threads.
struct BatchPlan {
  std::size_t substreams = 4;
  std::size_t workers = 1;
};

/// Draws raw projection norms for one spec. Representation draws use exact
/// reductions: the Gaussian sums are chi-square variates and, at p = 2, the
/// coordinate sum is a single Gamma(n/2) variate.
class ProjectionSampler {
 public:
  explicit ProjectionSampler(const ProjectionSpec& spec);

  double draw_raw(RngStream& rng);

 private:
  double draw_representation(RngStream& rng);
  double draw_direct(RngStream& rng);

  ProjectionSpec spec_;
  PGaussSampler pgauss_;
  std::vector<double> point_;
};

/// Evaluates the representation on explicit draws z (length n), w and g (length n).
double representation_norm(std::span<const double> z, double w, std::span<const double> g, long k, PExponent p);

StatSampleBatch sample_projection_norm(const ProjectionSpec& spec, std::size_t count, RngStream& rng);

/// Batch of RawNorm or CenteredX values split over substreams of `root`.
StatSampleBatch sample_statistic(const ProjectionSpec& spec, StatisticKind kind, std::size_t count,
                                 const RngStream& root, const BatchPlan& plan = {});

/// n^(1/p) raw / sqrt(M_p(2)) - sqrt(k); at p = infinity sqrt(3) raw - sqrt(k).
double statistic_x(const ProjectionSpec& spec, double raw_norm);

/// First-order term of the statistic built from the four normalized sums on
/// shared (Z, g) draws (Z with density ~ exp(-|x|^p/p)). Its variance is
/// clt_variance(p, k/n, MomentBased) for every n.
std::vector<double> sample_linearized_y1(long n, long k, PExponent p, std::size_t count, RngStream& rng);

}  // namespace lpproj
