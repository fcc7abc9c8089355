#include "lpproj/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lpproj/errors.hpp"
#include "lpproj/fluctuation.hpp"
#include "lpproj/projection.hpp"
#include "lpproj/special.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Integrand is cut where it falls below 1e-16 of its peak.
constexpr double kTailLogDrop = 36.841361487904734;

double require_finite_p(PExponent p, const char* what) {
  if (p.is_infinite()) {
    throw ArgumentError(std::string(what) + " needs a finite p");
  }
  return p.value();
}

}  // namespace

ExtReal::ExtReal(double value) : value_(value) {
  if (std::isnan(value)) {
    throw ArgumentError("rate value is NaN");
  }
  if (value == kInf) {
    infinite_ = true;
    value_ = 0.0;
  } else if (value == -kInf) {
    throw ArgumentError("rate value is -inf");
  }
}

ExtReal ExtReal::infinity() {
  ExtReal r;
  r.infinite_ = true;
  return r;
}

double ExtReal::value() const {
  if (infinite_) {
    throw PreconditionError("value() on +inf");
  }
  return value_;
}

double ExtReal::as_double() const { return infinite_ ? kInf : value_; }

std::string ExtReal::to_string() const { return infinite_ ? "inf" : format_real(value_); }

bool operator==(const ExtReal& a, const ExtReal& b) {
  return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
}

bool operator<(const ExtReal& a, const ExtReal& b) {
  if (a.infinite_) {
    return false;
  }
  return b.infinite_ || a.value_ < b.value_;
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
  if (a.infinite_ || b.infinite_) {
    return ExtReal::infinity();
  }
  return ExtReal(a.value_ + b.value_);
}

// ---------------------------------------------------------------------------
// cumulant

ExtReal cumulant_ip(PExponent p, double t1, double t2) {
  if (std::isnan(t1) || std::isnan(t2)) {
    throw ArgumentError("cumulant argument is NaN");
  }
  if (std::isinf(t1) || std::isinf(t2)) {
    throw ArgumentError("cumulant argument is infinite");
  }
  const double pv = require_finite_p(p, "cumulant_ip");
  const double decay = 1.0 / pv - t2;  // coefficient of -|x|^p
  const bool quadratic = pv == 2.0;
  // at p = 2 only t1 + t2 enters the integrand
  // for p != 2 the face t2 = 1/p is still integrable when t1 < 0
  if (quadratic ? !(t1 + t2 < 0.5) : !(decay > 0.0 || (decay == 0.0 && t1 < 0.0))) {
    return ExtReal::infinity();
  }
  if (pv < 2.0 && t1 > 0.0) {
    return ExtReal::infinity();
  }

  auto exponent = [&](double x) {
    if (quadratic) {
      return (t1 + t2 - 0.5) * x * x;
    }
    return t1 * x * x - decay * std::pow(x, pv);
  };

  // Peak of the exponent on [0, inf): interior only for p > 2 with t1 > 0.
  double peak_x = 0.0;
  if (pv > 2.0 && t1 > 0.0) {
    peak_x = std::pow(2.0 * t1 / (decay * pv), 1.0 / (pv - 2.0));
  }
  const double peak = exponent(peak_x);

  double right = std::max(1.0, 2.0 * peak_x);
  while (exponent(right) - peak > -kTailLogDrop) {
    right *= 2.0;
  }

  // Breakpoints where the exponent sits 1, 4 and 16 below its peak on each
  // side, so every piece is wide relative to the local curvature scale.
  auto level_point = [&](double inside, double outside, double drop) {
    for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-15 * std::abs(outside); ++it) {
      const double mid = 0.5 * (inside + outside);
      (exponent(mid) - peak > -drop ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  std::vector<double> cuts{0.0};
  if (peak_x > 0.0) {
    for (double drop : {16.0, 4.0, 1.0}) {
      if (exponent(0.0) - peak < -drop) {
        cuts.push_back(level_point(peak_x, 0.0, drop));
      }
    }
    cuts.push_back(peak_x);
  }
  for (double drop : {1.0, 4.0, 16.0}) {
    cuts.push_back(level_point(peak_x, right, drop));
  }
  cuts.push_back(right);
  std::vector<double> pieces{0.0};
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] - pieces.back() > 1e-6 * right) {
      pieces.push_back(cuts[i]);
    }
  }
  pieces.back() = right;

  auto integrand = [&](double x) { return std::exp(exponent(x) - peak); };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr double tol = 1e-11;
  constexpr unsigned depth = 12;
  double total = 0.0;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    total += Quad::integrate(integrand, pieces[i - 1], pieces[i], depth, tol);
  }
  // density normalizer of exp(-|x|^p / p) on the half line
  const double log_half_norm = std::log(pv) / pv + special::log_gamma(1.0 + 1.0 / pv);
  return ExtReal(peak + std::log(total) - log_half_norm);
}

// ---------------------------------------------------------------------------
// Fenchel conjugate

namespace {

using Vec = Eigen::VectorXd;

double eval_or_inf(const ConvexFunction& f, const Vec& t) {
  const ExtReal v = f(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
  return v.as_double();
}

void certify_convex_at(const ConvexFunction& f, const Vec& center, const FenchelOptions& opt) {
  const long d = center.size();
  const int m = std::max(1, opt.certificate_points);
  const double delta = opt.certificate_radius / m;
  std::vector<Vec> directions;
  for (long i = 0; i < d; ++i) {
    directions.push_back(Vec::Unit(d, i));
  }
  if (d > 1) {
    directions.push_back(Vec::Ones(d) / std::sqrt(static_cast<double>(d)));
  }
  for (const Vec& dir : directions) {
    std::vector<double> vals;
    for (int j = -m; j <= m; ++j) {
      vals.push_back(eval_or_inf(f, center + (j * delta) * dir));
    }
    for (std::size_t j = 1; j + 1 < vals.size(); ++j) {
      if (std::isinf(vals[j - 1]) || std::isinf(vals[j]) || std::isinf(vals[j + 1])) {
        continue;
      }
      const double second = vals[j - 1] - 2.0 * vals[j] + vals[j + 1];
      const double scale = 1.0 + std::abs(vals[j - 1]) + std::abs(vals[j]) + std::abs(vals[j + 1]);
      if (second < -1e-9 * scale) {
        throw PreconditionError("convexity certificate failed: second difference " + format_real(second) +
                                " along a probe direction");
      }
    }
  }
}

}  // namespace

FenchelResult fenchel_conjugate(const ConvexFunction& f, std::span<const double> x_in, const FenchelOptions& opt) {
  const long d = static_cast<long>(x_in.size());
  if (d == 0) {
    throw ArgumentError("conjugate point is empty");
  }
  for (double v : x_in) {
    if (std::isnan(v)) {
      throw ArgumentError("conjugate point has NaN");
    }
  }
  const Vec x = Eigen::Map<const Vec>(x_in.data(), d);
  Vec t = Vec::Zero(d);
  if (!opt.start.empty()) {
    if (static_cast<long>(opt.start.size()) != d) {
      throw ArgumentError("start point has the wrong dimension");
    }
    t = Eigen::Map<const Vec>(opt.start.data(), d);
  }
  double ft = eval_or_inf(f, t);
  if (std::isinf(ft)) {
    throw PreconditionError("f is infinite at the start point");
  }
  if (opt.check_convexity) {
    certify_convex_at(f, t, opt);
  }

  FenchelResult result;
  double obj = t.dot(x) - ft;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    result.iterations = iter + 1;

    // gradient of f
    Vec grad(d);
    for (long i = 0; i < d; ++i) {
      const double h = opt.gradient_step * std::max(1.0, std::abs(t[i]));
      Vec tp = t, tm = t;
      tp[i] += h;
      tm[i] -= h;
      const double fp = eval_or_inf(f, tp);
      const double fm = eval_or_inf(f, tm);
      if (std::isfinite(fp) && std::isfinite(fm)) {
        grad[i] = (fp - fm) / (2.0 * h);
      } else if (std::isfinite(fm)) {
        grad[i] = (ft - fm) / h;
      } else if (std::isfinite(fp)) {
        grad[i] = (fp - ft) / h;
      } else {
        grad[i] = 0.0;
      }
    }

    // Hessian of f; identity when a probe leaves the domain
    Eigen::MatrixXd hess(d, d);
    bool hess_ok = true;
    Vec hs(d);
    for (long i = 0; i < d; ++i) {
      hs[i] = opt.hessian_step * std::max(1.0, std::abs(t[i]));
    }
    for (long i = 0; i < d && hess_ok; ++i) {
      Vec tp = t, tm = t;
      tp[i] += hs[i];
      tm[i] -= hs[i];
      const double fp = eval_or_inf(f, tp), fm = eval_or_inf(f, tm);
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        hess_ok = false;
        break;
      }
      hess(i, i) = (fp - 2.0 * ft + fm) / (hs[i] * hs[i]);
      for (long j = 0; j < i; ++j) {
        double corner[4];
        int c = 0;
        for (double si : {1.0, -1.0}) {
          for (double sj : {1.0, -1.0}) {
            Vec tc = t;
            tc[i] += si * hs[i];
            tc[j] += sj * hs[j];
            corner[c++] = eval_or_inf(f, tc);
          }
        }
        if (!std::isfinite(corner[0]) || !std::isfinite(corner[1]) || !std::isfinite(corner[2]) ||
            !std::isfinite(corner[3])) {
          hess_ok = false;
          break;
        }
        hess(i, j) = hess(j, i) = (corner[0] - corner[1] - corner[2] + corner[3]) / (4.0 * hs[i] * hs[j]);
      }
    }

    const Vec ascent = x - grad;
    Vec dir;
    if (hess_ok) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
      Vec lam = eig.eigenvalues();
      const double floor = std::max(1e-10 * lam.cwiseAbs().maxCoeff(), 1e-300);
      for (long i = 0; i < d; ++i) {
        lam[i] = std::max(lam[i], floor);
      }
      dir = eig.eigenvectors() * (eig.eigenvectors().transpose() * ascent).cwiseQuotient(lam);
    } else {
      dir = ascent;
    }

    const double slope = ascent.dot(dir);
    bool accepted = false;
    double step = 1.0;
    Vec t_next;
    double obj_next = -kInf;
    double f_next = kInf;
    for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
      t_next = t + step * dir;
      f_next = eval_or_inf(f, t_next);
      if (std::isinf(f_next)) {
        continue;
      }
      obj_next = t_next.dot(x) - f_next;
      if (obj_next >= obj + 1e-4 * step * slope && obj_next > obj) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      break;
    }
    if (step == 1.0) {
      // expansion while the objective keeps rising; a linear ascent direction
      // reaches the escape radius in a few doublings
      for (int grow = 0; grow < 64 && t_next.norm() <= opt.escape_radius; ++grow) {
        const Vec t_far = t + 2.0 * (t_next - t);
        const double f_far = eval_or_inf(f, t_far);
        if (std::isinf(f_far)) {
          break;
        }
        const double obj_far = t_far.dot(x) - f_far;
        if (!(obj_far - obj_next > 1e-3 * opt.tolerance)) {
          break;
        }
        t_next = t_far;
        f_next = f_far;
        obj_next = obj_far;
      }
    }
    const double improvement = obj_next - obj;
    t = t_next;
    ft = f_next;
    obj = obj_next;
    if (t.norm() > opt.escape_radius) {
      result.value = ExtReal::infinity();
      result.diverged = true;
      result.argmax.assign(t.data(), t.data() + d);
      return result;
    }
    if (improvement < 1e-2 * opt.tolerance) {
      break;
    }
  }
  result.value = ExtReal(obj);
  result.argmax.assign(t.data(), t.data() + d);
  return result;
}

FenchelResult cumulant_conjugate(PExponent p, double x1, double x2, const FenchelOptions& options) {
  const double pv = require_finite_p(p, "cumulant_conjugate");
  FenchelResult outside;
  outside.value = ExtReal::infinity();
  outside.diverged = true;
  if (!(x1 > 0.0) || !(x2 > 0.0)) {
    return outside;
  }
  // The conjugate is finite exactly on the interior of the convex hull of
  // {(s^2, s^p) : s >= 0}: above the curve x2 = x1^(p/2) for p > 2, below it
  // for p < 2, and the diagonal itself for p = 2.
  if (pv == 2.0) {
    if (std::abs(x1 - x2) > 1e-12 * std::max(x1, x2)) {
      return outside;
    }
    const ConvexFunction g = [p](std::span<const double> s) { return cumulant_ip(p, s[0], 0.0); };
    const double mean = 0.5 * (x1 + x2);
    FenchelResult r = fenchel_conjugate(g, std::span<const double>(&mean, 1), options);
    r.argmax = {r.argmax.at(0), 0.0};
    return r;
  }
  const double curve = std::pow(x1, pv / 2.0);
  if (pv > 2.0 ? !(x2 > curve) : !(x2 < curve)) {
    return outside;
  }
  const ConvexFunction f = [p](std::span<const double> t) { return cumulant_ip(p, t[0], t[1]); };
  const double x[2] = {x1, x2};
  FenchelResult best = fenchel_conjugate(f, x, options);
  if (best.value.is_infinite()) {
    return best;
  }
  // The cumulant stays finite on parts of its domain boundary, where the
  // ascent above can only creep up to the sup. Maximize on those edges too.
  auto try_edge = [&](const ConvexFunction& edge, double coord, double fixed_t, double fixed_x, bool edge_is_t1,
                      double start) {
    FenchelOptions eo = options;
    eo.start = {start};
    FenchelResult r = fenchel_conjugate(edge, std::span<const double>(&coord, 1), eo);
    if (r.value.is_infinite()) {
      return;
    }
    const ExtReal v(r.value.value() + fixed_t * fixed_x);
    if (best.value < v) {
      best.value = v;
      best.argmax = edge_is_t1 ? std::vector<double>{r.argmax.at(0), fixed_t}
                               : std::vector<double>{fixed_t, r.argmax.at(0)};
      best.iterations += r.iterations;
    }
  };
  const double face_t2 = 1.0 / pv;
  const ConvexFunction on_face = [p, face_t2](std::span<const double> s) {
    return s[0] < 0.0 ? cumulant_ip(p, s[0], face_t2) : ExtReal::infinity();
  };
  try_edge(on_face, x1, face_t2, x2, true, -1.0);
  if (pv < 2.0) {
    const ConvexFunction on_axis = [p](std::span<const double> s) { return cumulant_ip(p, 0.0, s[0]); };
    try_edge(on_axis, x2, 0.0, x1, false, 0.0);
  }
  return best;
}

// ---------------------------------------------------------------------------
// rate functions

RateEvaluation rate_jp(PExponent p, double y) {
  if (std::isnan(y)) {
    throw ArgumentError("rate_jp argument is NaN");
  }
  const double pv = require_finite_p(p, "rate_jp");
  if (pv < 2.0) {
    throw ArgumentError("rate_jp needs p >= 2");
  }
  RateEvaluation out;
  out.value = ExtReal::infinity();
  if (!(y > 0.0)) {
    return out;
  }
  {
    // certify convexity of the cumulant once; the curve search skips it
    FenchelOptions certify;
    certify.max_iterations = 0;
    (void)cumulant_conjugate(p, 1.0, 1.0, certify);
  }
  FenchelOptions opt;
  opt.check_convexity = false;
  // objective along the constraint curve, parametrized by u = log x1
  auto along = [&](double u) {
    const double x1 = std::exp(u);
    const double x2 = std::pow(std::sqrt(x1) / y, pv);
    if (!(x2 > 0.0) || !std::isfinite(x2)) {
      return kInf;
    }
    return cumulant_conjugate(p, x1, x2, opt).value.as_double();
  };

  double lo = std::log(1e-6);
  double hi = std::log(1e6);
  const int scan = 41;
  for (int expansion = 0; expansion < 4; ++expansion) {
    std::vector<double> us(scan), vals(scan);
    for (int i = 0; i < scan; ++i) {
      us[i] = lo + (hi - lo) * i / (scan - 1);
      vals[i] = along(us[i]);
    }
    const auto best = std::min_element(vals.begin(), vals.end());
    if (std::isinf(*best)) {
      const double width = hi - lo;
      lo -= width;
      hi += width;
      continue;
    }
    const int i = static_cast<int>(best - vals.begin());
    if (i == 0 || i == scan - 1) {
      const double width = hi - lo;
      if (i == 0) {
        lo -= width;
      } else {
        hi += width;
      }
      continue;
    }
    // golden section on the bracketing cells
    double a = us[i - 1], b = us[i + 1];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), dd = a + g * (b - a);
    double fc = along(c), fd = along(dd);
    while (b - a > 1e-6) {
      if (fc <= fd) {
        b = dd;
        dd = c;
        fd = fc;
        c = b - g * (b - a);
        fc = along(c);
      } else {
        a = c;
        c = dd;
        fc = fd;
        dd = a + g * (b - a);
        fd = along(dd);
      }
    }
    double v = std::min({fc, fd, *best});
    const double u_best = v == *best ? us[i] : (fc <= fd ? c : dd);
    out.value = ExtReal(std::max(v, 0.0));
    out.argmin_x1 = std::exp(u_best);
    return out;
  }
  out.bracket_exhausted = true;
  return out;
}

ExtReal rate_i2(PExponent p, double lambda, double y, MConstantVariant m_variant) {
  if (std::isnan(y) || std::isnan(lambda)) {
    throw ArgumentError("rate_i2 argument is NaN");
  }
  const double pv = require_finite_p(p, "rate_i2");
  if (pv >= 2.0) {
    throw ArgumentError("rate_i2 needs 1 <= p < 2");
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ArgumentError("rate_i2 needs lambda in (0, 1]");
  }
  const double m = ldp_m_constant(p, m_variant);
  double excess = y * y / lambda - m;
  // y = sqrt(lambda m) is never exact in floating point
  if (std::abs(excess) <= 8.0 * std::numeric_limits<double>::epsilon() * m) {
    excess = 0.0;
  }
  if (y < 0.0 || excess < 0.0) {
    return ExtReal::infinity();
  }
  return ExtReal(std::pow(excess, pv / 2.0) / pv);
}

ExtReal rate_w(const WSpec& w, double y) {
  if (std::isnan(y)) {
    throw ArgumentError("rate_w argument is NaN");
  }
  if (w.kind == WSpec::Kind::Dirac0) {
    return y == 0.0 ? ExtReal(0.0) : ExtReal::infinity();
  }
  return y >= 0.0 ? ExtReal(y) : ExtReal::infinity();
}

// ---------------------------------------------------------------------------
// grids

std::size_t RateGrid::index(std::size_t i, std::size_t j) const {
  const std::size_t inner = axes.size() > 1 ? axes[1].size() : 1;
  return i * inner + j;
}

void RateGrid::certify_convexity(double tol) {
  convexity_certificate.assign(axes.size(), true);
  auto check_line = [&](const std::vector<double>& axis, auto value_at) {
    std::vector<double> xs, vs;
    for (std::size_t i = 0; i < axis.size(); ++i) {
      const ExtReal v = value_at(i);
      if (v.is_infinite()) {
        // finite values must be contiguous on a convex domain
        if (!xs.empty()) {
          for (std::size_t j = i + 1; j < axis.size(); ++j) {
            if (value_at(j).is_finite()) {
              return false;
            }
          }
          break;
        }
        continue;
      }
      xs.push_back(axis[i]);
      vs.push_back(v.value());
    }
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      const double left = (vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1]);
      const double right = (vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]);
      const double h = 0.5 * (xs[i + 1] - xs[i - 1]);
      if ((right - left) * h < -tol * (1.0 + std::abs(vs[i]))) {
        return false;
      }
    }
    return true;
  };
  if (axes.size() == 1) {
    convexity_certificate[0] = check_line(axes[0], [&](std::size_t i) { return values[i]; });
    return;
  }
  for (std::size_t j = 0; j < axes[1].size(); ++j) {
    if (!check_line(axes[0], [&](std::size_t i) { return values[index(i, j)]; })) {
      convexity_certificate[0] = false;
    }
  }
  for (std::size_t i = 0; i < axes[0].size(); ++i) {
    if (!check_line(axes[1], [&](std::size_t j) { return values[index(i, j)]; })) {
      convexity_certificate[1] = false;
    }
  }
}

namespace {

void require_sorted(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) {
    throw ArgumentError(std::string(name) + " axis is empty");
  }
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw ArgumentError(std::string(name) + " axis must be strictly increasing");
    }
  }
}

RateGrid make_grid_2d(std::string label, const char* n1, const std::vector<double>& a1, const char* n2,
                      const std::vector<double>& a2) {
  require_sorted(a1, n1);
  require_sorted(a2, n2);
  RateGrid g;
  g.label = std::move(label);
  g.axis_names = {n1, n2};
  g.axes = {a1, a2};
  g.values.assign(a1.size() * a2.size(), ExtReal(0.0));
  g.flags.assign(g.values.size(), "");
  return g;
}

RateGrid make_grid_1d(std::string label, const char* n1, const std::vector<double>& a1) {
  require_sorted(a1, n1);
  RateGrid g;
  g.label = std::move(label);
  g.axis_names = {n1};
  g.axes = {a1};
  g.values.assign(a1.size(), ExtReal(0.0));
  g.flags.assign(g.values.size(), "");
  return g;
}

}  // namespace

RateGrid tabulate_cumulant(PExponent p, const std::vector<double>& t1_axis, const std::vector<double>& t2_axis) {
  RateGrid g = make_grid_2d("cumulant:p=" + p.to_string(), "t1", t1_axis, "t2", t2_axis);
  for (std::size_t i = 0; i < t1_axis.size(); ++i) {
    for (std::size_t j = 0; j < t2_axis.size(); ++j) {
      g.values[g.index(i, j)] = cumulant_ip(p, t1_axis[i], t2_axis[j]);
    }
  }
  g.certify_convexity();
  return g;
}

RateGrid tabulate_cumulant_conjugate(PExponent p, const std::vector<double>& x1_axis,
                                     const std::vector<double>& x2_axis) {
  RateGrid g = make_grid_2d("cumulant-conjugate:p=" + p.to_string(), "x1", x1_axis, "x2", x2_axis);
  FenchelOptions opt;
  opt.check_convexity = false;
  for (std::size_t i = 0; i < x1_axis.size(); ++i) {
    for (std::size_t j = 0; j < x2_axis.size(); ++j) {
      const FenchelResult r = cumulant_conjugate(p, x1_axis[i], x2_axis[j], opt);
      g.values[g.index(i, j)] = r.value;
      if (r.diverged) {
        g.flags[g.index(i, j)] = "diverged";
      }
    }
  }
  g.certify_convexity(1e-6);
  return g;
}

RateGrid tabulate_rate_jp(PExponent p, const std::vector<double>& y_axis) {
  RateGrid g = make_grid_1d("rate-jp:p=" + p.to_string(), "y", y_axis);
  for (std::size_t i = 0; i < y_axis.size(); ++i) {
    const RateEvaluation r = rate_jp(p, y_axis[i]);
    g.values[i] = r.value;
    if (r.bracket_exhausted) {
      g.flags[i] = "bracket_exhausted";
    }
  }
  g.certify_convexity(1e-6);
  return g;
}

RateGrid tabulate_rate_i2(PExponent p, double lambda, const std::vector<double>& y_axis, MConstantVariant m_variant) {
  RateGrid g = make_grid_1d("rate-i2:p=" + p.to_string() + ",lambda=" + format_real(lambda) + ",m=" +
                                to_string(m_variant),
                            "y", y_axis);
  for (std::size_t i = 0; i < y_axis.size(); ++i) {
    g.values[i] = rate_i2(p, lambda, y_axis[i], m_variant);
  }
  g.certify_convexity();
  return g;
}

RateGrid tabulate_rate_w(const WSpec& w, const std::vector<double>& y_axis) {
  RateGrid g = make_grid_1d("rate-w:w=" + w.to_string(), "y", y_axis);
  for (std::size_t i = 0; i < y_axis.size(); ++i) {
    g.values[i] = rate_w(w, y_axis[i]);
  }
  g.certify_convexity();
  return g;
}

ExtReal discrete_conjugate(const RateGrid& grid, std::span<const double> t) {
  if (t.size() != grid.axes.size()) {
    throw ArgumentError("conjugate point dimension differs from the grid");
  }
  double best = -kInf;
  for (std::size_t c = 0; c < grid.values.size(); ++c) {
    if (grid.values[c].is_infinite()) {
      continue;
    }
    double dot = 0.0;
    if (grid.axes.size() == 1) {
      dot = t[0] * grid.axes[0][c];
    } else {
      const std::size_t inner = grid.axes[1].size();
      dot = t[0] * grid.axes[0][c / inner] + t[1] * grid.axes[1][c % inner];
    }
    best = std::max(best, dot - grid.values[c].value());
  }
  if (best == -kInf) {
    throw PreconditionError("grid has no finite value");
  }
  return ExtReal(best);
}

// ---------------------------------------------------------------------------
// tail rates

RateGrid empirical_tail_rate(const TailRateSpec& spec) {
  const double pv = require_finite_p(spec.p, "empirical_tail_rate");
  if (spec.n_grid.empty()) {
    throw ArgumentError("n grid is empty");
  }
  if (!(spec.lambda > 0.0 && spec.lambda <= 1.0)) {
    throw ArgumentError("lambda must lie in (0, 1]");
  }
  if (spec.samples.size() != 1 && spec.samples.size() != spec.n_grid.size()) {
    throw ArgumentError("need one sample count or one per n");
  }
  std::vector<double> axis(spec.n_grid.begin(), spec.n_grid.end());
  RateGrid g = make_grid_1d("tail-rate:p=" + spec.p.to_string() + ",lambda=" + format_real(spec.lambda) +
                                ",w=" + spec.w.to_string() + ",y=" + format_real(spec.y),
                            "n", axis);
  g.lower.assign(axis.size(), 0.0);
  g.upper.assign(axis.size(), 0.0);
  const KRule rule;
  const RngStream root(spec.seed, 0);
  for (std::size_t c = 0; c < spec.n_grid.size(); ++c) {
    const long n = spec.n_grid[c];
    const long k = rule.k_for(n, spec.lambda);
    const std::size_t count = spec.samples.size() == 1 ? spec.samples[0] : spec.samples[c];
    if (count == 0) {
      throw ArgumentError("sample count must be positive");
    }
    ProjectionSpec ps;
    ps.n = n;
    ps.k = k;
    ps.p = spec.p;
    ps.w = spec.w;
    ps.conv = spec.conv;
    ps.validate();
    const double scale = std::pow(static_cast<double>(n), 1.0 / pv - 0.5);
    const double speed = pv < 2.0 ? std::pow(static_cast<double>(n), pv / 2.0) : static_cast<double>(n);

    const RngStream cell = root.split(c);
    const std::size_t streams = std::max<std::size_t>(1, spec.substreams);
    std::vector<std::size_t> hits(streams, 0);
    parallel_for(streams, spec.workers, [&](std::size_t s) {
      RngStream rng = cell.split(s);
      ProjectionSampler sampler(ps);
      const std::size_t share = count / streams + (s < count % streams ? 1 : 0);
      std::size_t h = 0;
      for (std::size_t i = 0; i < share; ++i) {
        if (scale * sampler.draw_raw(rng) >= spec.y) {
          ++h;
        }
      }
      hits[s] = h;
    });
    std::size_t total_hits = 0;
    for (std::size_t h : hits) {
      total_hits += h;
    }

    const double nn = static_cast<double>(count);
    const double phat = static_cast<double>(total_hits) / nn;
    const double z = spec.confidence_z;
    const double z2 = z * z;
    const double centre = (phat + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = z / (1.0 + z2 / nn) * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
    const double p_lo = std::max(0.0, centre - half);
    const double p_hi = std::min(1.0, centre + half);
    auto rate_of = [&](double prob) { return prob <= 0.0 ? kInf : std::max(0.0, -std::log(prob) / speed); };
    g.lower[c] = rate_of(p_hi);
    g.upper[c] = rate_of(total_hits == 0 ? 0.0 : p_lo);
    if (total_hits == 0) {
      g.flags[c] = "below_floor";
      g.values[c] = ExtReal(g.lower[c]);
    } else {
      g.values[c] = ExtReal(rate_of(phat));
    }
  }
  g.certify_convexity();
  return g;
}

}  // namespace lpproj
