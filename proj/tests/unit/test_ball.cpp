#include <doctest.h>

#include <cmath>

#include "lpproj/ball_measures.hpp"
#include "lpproj/errors.hpp"
#include "lpproj/fluctuation.hpp"
#include "oracles.hpp"

using namespace lpproj;

namespace {
PExponent P(double v) { return PExponent::finite(v); }
}  // namespace

TEST_SUITE("ball_measures") {

TEST_CASE("batch shape and provenance") {
  RngStream r(7, 3);
  const auto b = sample_ball_point({5, P(1.5), WSpec::gamma(2), ScaleConvention::UnitDensity}, 40, r);
  CHECK(b.points.rows() == 40);
  CHECK(b.points.cols() == 5);
  CHECK(b.provenance.seed == 7);
  CHECK(b.provenance.stream_id == 3);
}

TEST_CASE("points lie in the ball") {
  RngStream r(31);
  for (double pv : {1.0, 2.0, 3.5}) {
    for (const WSpec& w : {WSpec::dirac0(), WSpec::exponential1(), WSpec::gamma(0.5)}) {
      const auto b = sample_ball_point({7, P(pv), w, ScaleConvention::UnitDensity}, 2000, r);
      for (Eigen::Index i = 0; i < b.points.rows(); ++i) {
        const double norm = lp_norm(std::span<const double>(b.points.row(i).data(), 7), P(pv));
        REQUIRE(norm <= 1.0 + 1e-12);
        if (w == WSpec::dirac0()) {
          REQUIRE(std::abs(norm - 1.0) <= 1e-12);
        }
      }
    }
  }
  const auto cube = sample_ball_point({4, PExponent::infinity(), WSpec::exponential1(), ScaleConvention::UnitDensity},
                                      2000, r);
  CHECK(cube.points.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("cube needs uniform mixing") {
  RngStream r(1);
  CHECK_THROWS_AS(sample_ball_point({3, PExponent::infinity(), WSpec::dirac0(), ScaleConvention::UnitDensity}, 1, r),
                  ArgumentError);
  CHECK_THROWS_AS(sample_ball_point({3, P(2), WSpec::dirac0(), ScaleConvention::UnitDensity}, 0, r), ArgumentError);
}

TEST_CASE("uniform disc radial fraction") {
  RngStream r(32);
  const auto b = sample_ball_point({2, P(2), WSpec::exponential1(), ScaleConvention::UnitDensity}, 1000000, r);
  double inside = 0.0;
  for (Eigen::Index i = 0; i < b.points.rows(); ++i) {
    inside += b.points.row(i).norm() <= 0.5 ? 1.0 : 0.0;
  }
  const double frac = inside / b.points.rows();
  CHECK(std::abs(frac - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / b.points.rows()));
}

TEST_CASE("lp norms") {
  const double x[] = {3.0, -4.0};
  CHECK(lp_norm(x, P(2)) == doctest::Approx(5.0));
  CHECK(lp_norm(x, P(1)) == doctest::Approx(7.0));
  CHECK(lp_norm(x, PExponent::infinity()) == 4.0);
}

TEST_CASE("radial distribution function") {
  CHECK(radial_pnorm_cdf(4, P(2), 2, 0.0) == 0.0);
  CHECK(radial_pnorm_cdf(4, P(2), 2, 1.0) == 1.0);
  for (double r : {0.1, 0.5, 0.9}) {
    CHECK(radial_pnorm_cdf(5, P(1), 1, r) == doctest::Approx(std::pow(r, 5)).epsilon(1e-13));
  }
  // quadrature of the radial density ~ r^(n-1) (1 - r^p)^(alpha-1)
  auto quad = [](long n, double p, double a, double r) {
    auto dens = [&](double s) { return std::pow(s, n - 1) * std::pow(1.0 - std::pow(s, p), a - 1.0); };
    return oracle::simpson(dens, 0.0, r, 1e-14) / oracle::simpson(dens, 0.0, 1.0, 1e-14);
  };
  CHECK(radial_pnorm_cdf(4, P(2), 2, 0.8) == doctest::Approx(quad(4, 2, 2, 0.8)).epsilon(1e-10));
  CHECK(radial_pnorm_cdf(4, P(2), 2, 0.8) == doctest::Approx(0.704512).epsilon(1e-13));
  CHECK(radial_pnorm_cdf(6, P(3), 2, 0.9) == doctest::Approx(0.81948202200000006).epsilon(1e-13));
  CHECK(radial_pnorm_cdf(10, P(4), 3, 0.95) == doctest::Approx(0.96652252470722902).epsilon(1e-12));
  CHECK(radial_pnorm_cdf(3, P(1.5), 0.5, 0.3) == doctest::Approx(0.010737212960554125).epsilon(1e-11));
  CHECK_THROWS_AS(radial_pnorm_cdf(4, P(2), 2, 1.2), ArgumentError);
  CHECK_THROWS_AS(radial_pnorm_cdf(4, P(2), 2, -0.1), ArgumentError);
}

TEST_CASE("mixture density h") {
  for (double r : {0.0, 0.3, 0.99}) {
    CHECK(mixture_density_h(r, 4, P(2), WSpec::exponential1()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mixture_density_h(r, 4, P(2), WSpec::dirac0()) == 0.0);
  }
  // quadrature of the defining integral against the Gamma(alpha) density
  struct Row {
    double r;
    long n;
    double p, alpha, h;
  };
  for (const Row& row : {Row{0.3, 4, 2, 2, 2.73}, Row{0.7, 6, 3, 2, 1.9710000000000002},
                         Row{0.5, 3, 1, 0.5, 0.4419417382415922}, Row{0.9, 5, 1.5, 3, 0.24694295610486842}}) {
    CAPTURE(row.r);
    CHECK(mixture_density_h(row.r, row.n, P(row.p), WSpec::gamma(row.alpha)) == doctest::Approx(row.h).epsilon(1e-8));
  }
  CHECK_THROWS_AS(mixture_density_h(1.0, 4, P(2), WSpec::gamma(2)), ArgumentError);
}

TEST_CASE("radial law under the canonical convention") {
  RngStream r(33);
  const long n = 6;
  const auto b = sample_ball_point({n, P(3), WSpec::gamma(2), ScaleConvention::UnitDensity}, 200000, r);
  std::vector<double> s(b.points.rows());
  for (Eigen::Index i = 0; i < b.points.rows(); ++i) {
    s[i] = std::pow(lp_norm(std::span<const double>(b.points.row(i).data(), n), P(3)), 3.0);
  }
  CHECK(ks_test(s, [](double x) { return oracle::beta_cdf(2.0, 2.0, x); }).p_value > 0.01);
}

TEST_CASE("sign symmetry of the first coordinate") {
  RngStream r(34);
  const auto b = sample_ball_point({5, P(1.5), WSpec::exponential1(), ScaleConvention::UnitDensity}, 100000, r);
  std::vector<double> x(b.points.rows()), neg(b.points.rows());
  for (Eigen::Index i = 0; i < b.points.rows(); ++i) {
    x[i] = b.points(i, 0);
    neg[i] = -x[i];
  }
  CHECK(ks_test_two_sample(x, neg).p_value > 0.01);
}

}  // TEST_SUITE
