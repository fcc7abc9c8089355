#include <doctest.h>

#include <cmath>

#include "lpproj/errors.hpp"
#include "lpproj/fluctuation.hpp"
#include "lpproj/moments.hpp"
#include "lpproj/projection.hpp"
#include "oracles.hpp"

using namespace lpproj;

namespace {
PExponent P(double v) { return PExponent::finite(v); }

ProjectionSpec spec(long n, long k, PExponent p, WSpec w, ProjectionMethod m = ProjectionMethod::Representation) {
  ProjectionSpec s;
  s.n = n;
  s.k = k;
  s.p = p;
  s.w = w;
  s.method = m;
  return s;
}
}  // namespace

TEST_SUITE("projection_stats") {

TEST_CASE("k must not exceed n") {
  RngStream r(1);
  CHECK_THROWS_AS(sample_projection_norm(spec(4, 5, P(2), WSpec::dirac0()), 10, r), ArgumentError);
  CHECK_THROWS_AS(sample_projection_norm(spec(4, 0, P(2), WSpec::dirac0()), 10, r), ArgumentError);
}

TEST_CASE("cone measure at p = 2 with k = n has unit norm") {
  for (auto m : {ProjectionMethod::Representation, ProjectionMethod::DirectHaar}) {
    RngStream r(41);
    const auto s = spec(9, 9, P(2), WSpec::dirac0(), m);
    const auto b = sample_projection_norm(s, 2000, r);
    for (double v : b.values) {
      REQUIRE(std::abs(v - 1.0) <= 1e-12);
      REQUIRE(statistic_x(s, v) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  const auto s = spec(64, 64, P(2), WSpec::dirac0());
  const auto x = sample_statistic(s, StatisticKind::CenteredX, 10000, RngStream(2));
  for (double v : x.values) {
    REQUIRE(std::abs(v) <= 1e-12);
  }
}

TEST_CASE("raw norms lie in [0, 1]") {
  RngStream r(42);
  for (auto m : {ProjectionMethod::Representation, ProjectionMethod::DirectHaar}) {
    const auto b = sample_projection_norm(spec(10, 4, P(1.5), WSpec::gamma(2), m), 3000, r);
    REQUIRE(b.values.size() == 3000);
    for (double v : b.values) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("centered statistic") {
  CHECK(statistic_x(spec(16, 4, P(2), WSpec::dirac0()), 2.0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(statistic_x(spec(20, 9, PExponent::infinity(), WSpec::exponential1()), 1.0) ==
        doctest::Approx(std::sqrt(3.0) - 3.0).epsilon(1e-14));
  const auto s = spec(100, 30, P(3), WSpec::exponential1());
  CHECK(statistic_x(s, 0.2) ==
        doctest::Approx(std::pow(100.0, 1.0 / 3.0) * 0.2 / std::sqrt(0.7764582113784204) - std::sqrt(30.0)));
}

TEST_CASE("representation on explicit draws") {
  const double z[] = {1.0, -2.0, 0.5};
  const double g[] = {0.3, 1.0, -1.0};
  // sqrt(5.25) / (5.25 + 0.75)^(1/2) * sqrt(0.09 + 1) / sqrt(2.09)
  const double expect = std::sqrt(5.25) / std::sqrt(6.0) * std::sqrt(1.09 / 2.09);
  CHECK(representation_norm(z, 0.75, g, 2, P(2)) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("norm is nondecreasing in k on shared draws") {
  RngStream r(43);
  std::vector<double> z(12), g(12);
  for (int rep = 0; rep < 500; ++rep) {
    for (int i = 0; i < 12; ++i) {
      z[i] = r.normal();
      g[i] = r.normal();
    }
    const double w = r.uniform();
    double prev = 0.0;
    for (long k = 1; k <= 12; ++k) {
      const double v = representation_norm(z, w, g, k, P(3));
      REQUIRE(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("scale invariance at p = 2 without mixing") {
  RngStream r(44);
  std::vector<double> z(8), zs(8), g(8);
  for (int rep = 0; rep < 200; ++rep) {
    for (int i = 0; i < 8; ++i) {
      z[i] = r.normal();
      zs[i] = 3.7 * z[i];
      g[i] = r.normal();
    }
    REQUIRE(representation_norm(z, 0.0, g, 3, P(2)) == doctest::Approx(representation_norm(zs, 0.0, g, 3, P(2))).epsilon(1e-14));
  }
}

TEST_CASE("representation agrees with direct Haar projection") {
  for (double pv : {1.0, 3.5}) {
    const auto rep = sample_statistic(spec(8, 3, P(pv), WSpec::exponential1()), StatisticKind::RawNorm, 40000,
                                      RngStream(45, 0));
    const auto dir = sample_statistic(spec(8, 3, P(pv), WSpec::exponential1(), ProjectionMethod::DirectHaar),
                                      StatisticKind::RawNorm, 40000, RngStream(45, 1));
    CHECK(ks_test_two_sample(rep.values, dir.values).p_value > 0.01);
  }
}

TEST_CASE("both samplers follow the exact law at p = 2") {
  // ||P_E X||^2 = R B, R ~ Beta(n/2, alpha), B ~ Beta(k/2, (n-k)/2)
  const long n = 10, k = 4;
  const auto exact = oracle::tabulate_cdf([](double r) { return oracle::p2_raw_norm_cdf(10, 4, 2.0, r); }, 0.0, 1.0, 1000);
  for (auto m : {ProjectionMethod::Representation, ProjectionMethod::DirectHaar}) {
    const auto b = sample_statistic(spec(n, k, P(2), WSpec::gamma(2), m), StatisticKind::RawNorm, 20000,
                                    RngStream(46));
    CHECK(ks_test(b.values, exact).p_value > 0.01);
  }
}

TEST_CASE("unscaled W with the exp(-|x|^p/p) density is slightly off at finite n") {
  auto lit = spec(3, 3, P(1), WSpec::exponential1());
  lit.conv = ScaleConvention::PaperDensity;
  const auto a = sample_statistic(lit, StatisticKind::RawNorm, 100000, RngStream(47, 0));
  const auto b = sample_statistic(spec(3, 3, P(1), WSpec::exponential1()), StatisticKind::RawNorm, 100000,
                                  RngStream(47, 1));
  // p = 1: literal pairing equals the canonical one only after W -> W / p, a no-op here
  CHECK(ks_test_two_sample(a.values, b.values).p_value > 0.01);
  auto lit3 = spec(3, 3, P(3), WSpec::exponential1());
  lit3.conv = ScaleConvention::PaperDensity;
  const auto c = sample_statistic(lit3, StatisticKind::RawNorm, 100000, RngStream(47, 2));
  const auto d = sample_statistic(spec(3, 3, P(3), WSpec::exponential1()), StatisticKind::RawNorm, 100000,
                                  RngStream(47, 3));
  CHECK(ks_test_two_sample(c.values, d.values).p_value < 0.01);
}

TEST_CASE("batches do not depend on the worker count") {
  const auto s = spec(50, 20, P(1.5), WSpec::gamma(2));
  const auto a = sample_statistic(s, StatisticKind::CenteredX, 5000, RngStream(48), {4, 1});
  const auto b = sample_statistic(s, StatisticKind::CenteredX, 5000, RngStream(48), {4, 3});
  CHECK(a.values == b.values);
  const auto c = sample_statistic(s, StatisticKind::CenteredX, 5000, RngStream(48), {4, 1});
  CHECK(a.values == c.values);
}

TEST_CASE("linearized term") {
  RngStream r(49);
  const auto y = sample_linearized_y1(1000, 500, P(1), 100000, r);
  CHECK(y.size() == 100000);
  CHECK(std::abs(oracle::mean(y)) < 4.0 * std::sqrt(oracle::variance(y) / y.size()));
  const auto flat = sample_linearized_y1(64, 64, P(2), 1000, r);
  for (double v : flat) {
    REQUIRE(std::abs(v) < 1e-12);
  }
}

}  // TEST_SUITE
