#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpproj/moments.hpp"
#include "lpproj/rng.hpp"
#include "lpproj/sampling.hpp"

namespace lpproj {

/// Real number or +infinity; rate functions and conjugates take values in [0, +inf].
class ExtReal {
 public:
  ExtReal(double value = 0.0);  // NOLINT(google-explicit-constructor): finite values convert implicitly
  static ExtReal infinity();

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  /// Finite value; throws PreconditionError on +inf.
  double value() const;
  /// Finite value or std::numeric_limits<double>::infinity().
  double as_double() const;
  std::string to_string() const;

  friend bool operator==(const ExtReal& a, const ExtReal& b);
  friend bool operator<(const ExtReal& a, const ExtReal& b);
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend ExtReal operator+(const ExtReal& a, const ExtReal& b);

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// I_p(t1, t2) = log E exp(t1 Z^2 + t2 |Z|^p), Z with density ~ exp(-|x|^p / p).
/// +inf outside the integrability domain. For p != 2 that is t2 < 1/p plus the
/// face t2 = 1/p with t1 < 0, and additionally t1 <= 0 when p < 2. For p = 2 the
/// integrand depends on t1 + t2 only and the domain is t1 + t2 < 1/2.
ExtReal cumulant_ip(PExponent p, double t1, double t2);

using ConvexFunction = std::function<ExtReal(std::span<const double>)>;

struct FenchelOptions {
  double tolerance = 1e-7;        // objective change at convergence
  double escape_radius = 1e6;     // sup declared infinite beyond this radius
  int max_iterations = 400;
  double gradient_step = 1e-5;
  double hessian_step = 1e-4;
  std::vector<double> start;      // defaults to the origin; f must be finite there
  bool check_convexity = true;
  double certificate_radius = 0.05;
  int certificate_points = 4;     // per side along each axis
};

struct FenchelResult {
  ExtReal value;
  std::vector<double> argmax;
  int iterations = 0;
  bool diverged = false;
};

/// f*(x) = sup_t <t, x> - f(t) by damped Newton ascent with finite-difference
/// derivatives. Throws PreconditionError when the convexity certificate of f
/// around the start point fails.
FenchelResult fenchel_conjugate(const ConvexFunction& f, std::span<const double> x, const FenchelOptions& options = {});

/// Two-variable conjugate I_p^*(x1, x2). Besides the interior ascent, the
/// boundary edges where I_p is finite (t2 = 1/p, and t1 = 0 for p < 2) are
/// maximized separately and the larger value is returned.
FenchelResult cumulant_conjugate(PExponent p, double x1, double x2, const FenchelOptions& options = {});

struct RateEvaluation {
  ExtReal value;
  double argmin_x1 = 0.0;
  bool bracket_exhausted = false;
};

/// J_p(y) = inf { I_p^*(x1, x2) : x1, x2 > 0, x1^(1/2) x2^(-1/p) = y } for p >= 2,
/// minimized over x1 along x2 = (x1^(1/2) / y)^p.
RateEvaluation rate_jp(PExponent p, double y);

/// (1/p)(y^2/lambda - m)^(p/2) for y >= sqrt(lambda m), +inf otherwise; p in [1, 2).
ExtReal rate_i2(PExponent p, double lambda, double y, MConstantVariant m_variant = MConstantVariant::AsPrinted);

/// Rate of W/n at speed n: y for y >= 0 (Exponential1, Gamma); Dirac0 vanishes
/// only at y = 0.
ExtReal rate_w(const WSpec& w, double y);

/// Tabulated rate values over one or two axes (row-major, first axis outer).
struct RateGrid {
  std::string label;
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axes;
  std::vector<ExtReal> values;
  std::vector<std::string> flags;  // empty string when the cell is unflagged
  std::vector<double> lower;       // optional confidence bounds, same layout as values
  std::vector<double> upper;
  std::vector<bool> convexity_certificate;  // one per axis

  std::size_t size() const { return values.size(); }
  std::size_t index(std::size_t i, std::size_t j = 0) const;
  /// Sets the certificate of each axis: along every line of the grid the
  /// finite values have nondecreasing slopes (within tol).
  void certify_convexity(double tol = 1e-9);
};

RateGrid tabulate_cumulant(PExponent p, const std::vector<double>& t1_axis, const std::vector<double>& t2_axis);
RateGrid tabulate_cumulant_conjugate(PExponent p, const std::vector<double>& x1_axis,
                                     const std::vector<double>& x2_axis);
RateGrid tabulate_rate_jp(PExponent p, const std::vector<double>& y_axis);
RateGrid tabulate_rate_i2(PExponent p, double lambda, const std::vector<double>& y_axis, MConstantVariant m_variant);
RateGrid tabulate_rate_w(const WSpec& w, const std::vector<double>& y_axis);

/// max over finite grid cells of <t, x> - value(x): the conjugate of a tabulated function.
ExtReal discrete_conjugate(const RateGrid& grid, std::span<const double> t);

struct TailRateSpec {
  PExponent p = PExponent::finite(1.0);
  double lambda = 1.0;
  WSpec w = WSpec::exponential1();
  double y = 1.0;
  std::vector<long> n_grid;
  std::vector<std::size_t> samples;  // one per n (or a single shared count)
  std::uint64_t seed = 0;
  std::size_t substreams = 4;
  std::size_t workers = 1;
  ScaleConvention conv = ScaleConvention::UnitDensity;
  double confidence_z = 1.959963984540054;
};

/// Monte Carlo -log P(n^(1/p - 1/2) ||P_E X||_2 >= y) / speed(n) per n, with
/// speed n^(p/2) for p < 2 and n otherwise, and Wilson bounds in lower/upper.
/// Cells without a single exceedance carry the flag "below_floor" and the
/// rate implied by the Wilson upper probability bound.
RateGrid empirical_tail_rate(const TailRateSpec& spec);

}  // namespace lpproj
