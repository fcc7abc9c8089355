#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "lpproj/errors.hpp"
#include "lpproj/fluctuation.hpp"
#include "lpproj/sampling.hpp"
#include "oracles.hpp"

using namespace lpproj;

TEST_SUITE("core_sampling") {

TEST_CASE("streams are reproducible and keyed by stream id") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  CHECK(a.provenance().seed == 42);
  CHECK(a.provenance().stream_id == 7);

  RngStream s1(3, 0), s2(3, 0);
  CHECK(sample_pgauss(PExponent::finite(1.5), ScaleConvention::PaperDensity, 500, s1) ==
        sample_pgauss(PExponent::finite(1.5), ScaleConvention::PaperDensity, 500, s2));
}

TEST_CASE("split children are distinct streams") {
  const RngStream root(1, 0);
  RngStream x = root.split(0), y = root.split(1), x2 = root.split(0);
  CHECK(x.stream_id() != y.stream_id());
  CHECK(x.next_u64() == x2.next_u64());
  // correlation of uniforms across siblings
  double sxy = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    sxy += (x.uniform() - 0.5) * (y.uniform() - 0.5);
  }
  CHECK(std::abs(sxy / n) < 4.0 / 12.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniforms") {
  RngStream r(5);
  std::vector<std::size_t> bins(20, 0);
  for (int i = 0; i < 200000; ++i) {
    const double u = r.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    ++bins[static_cast<std::size_t>(u * 20)];
  }
  CHECK(chi_square_uniform(bins).p_value > 0.01);
}

TEST_CASE("PExponent parsing") {
  CHECK(PExponent::parse("inf").is_infinite());
  CHECK(PExponent::parse("Infinity").is_infinite());
  CHECK(PExponent::parse("3.5").value() == 3.5);
  CHECK_THROWS_AS(PExponent::parse("0.5"), ArgumentError);
  CHECK_THROWS_AS(PExponent::finite(std::nan("")), ArgumentError);
  CHECK_THROWS_AS(PExponent::infinity().value(), ArgumentError);
}

TEST_CASE("WSpec parsing") {
  CHECK(WSpec::parse("dirac0") == WSpec::dirac0());
  CHECK(WSpec::parse("exponential1") == WSpec::exponential1());
  CHECK(WSpec::parse("gamma:2.5").shape == 2.5);
  CHECK(WSpec::parse("gamma(3)").shape == 3.0);
  CHECK(WSpec::parse(WSpec::gamma(2).to_string()) == WSpec::gamma(2));
  CHECK_THROWS_AS(WSpec::gamma(0.0), ArgumentError);
  CHECK_THROWS_AS(WSpec::parse("beta:2"), ArgumentError);
}

TEST_CASE("mean of |Z|^2 at p = 2 and p = 1") {
  for (auto [pv, target] : {std::pair{2.0, 1.0}, std::pair{1.0, 2.0}}) {
    RngStream r(11);
    const auto z = sample_pgauss(PExponent::finite(pv), ScaleConvention::PaperDensity, 1000000, r);
    std::vector<double> sq(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      sq[i] = z[i] * z[i];
    }
    const double se = std::sqrt(oracle::variance(sq) / sq.size());
    CHECK(std::abs(oracle::mean(sq) - target) < 4.0 * se);
  }
}

TEST_CASE("sign symmetry") {
  for (double pv : {1.0, 2.0, 3.5}) {
    RngStream r(12);
    auto z = sample_pgauss(PExponent::finite(pv), ScaleConvention::UnitDensity, 100000, r);
    std::vector<double> neg(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      neg[i] = -z[i];
    }
    CHECK(ks_test_two_sample(z, neg).p_value > 0.01);
  }
}

TEST_CASE("conventions differ by the factor p^(1/p)") {
  for (double pv : {1.0, 3.0}) {
    const PExponent p = PExponent::finite(pv);
    RngStream a(13, 0), b(13, 1);
    auto unit = sample_pgauss(p, ScaleConvention::UnitDensity, 100000, a);
    const auto paper = sample_pgauss(p, ScaleConvention::PaperDensity, 100000, b);
    for (double& x : unit) {
      x *= std::pow(pv, 1.0 / pv);
    }
    CHECK(ks_test_two_sample(unit, paper).p_value > 0.01);
  }
}

TEST_CASE("p = infinity is uniform on [-1, 1]") {
  RngStream r(14);
  const auto z = sample_pgauss(PExponent::infinity(), ScaleConvention::PaperDensity, 100000, r);
  for (double x : z) {
    REQUIRE(std::abs(x) <= 1.0);
  }
  CHECK(ks_test(z, [](double t) { return std::clamp((t + 1.0) / 2.0, 0.0, 1.0); }).p_value > 0.01);
}

TEST_CASE("generalized Gaussian matches its density") {
  // unit density ~ exp(-|x|^p): distribution function by quadrature
  const double pv = 3.0;
  const double norm = 2.0 * std::tgamma(1.0 + 1.0 / pv);
  auto cdf = [&](double t) {
    const double half = oracle::simpson([&](double x) { return std::exp(-std::pow(x, pv)); }, 0.0, std::abs(t)) / norm;
    return t >= 0.0 ? 0.5 + half : 0.5 - half;
  };
  RngStream r(15);
  const auto z = sample_pgauss(PExponent::finite(pv), ScaleConvention::UnitDensity, 20000, r);
  CHECK(ks_test(z, cdf).p_value > 0.01);
}

TEST_CASE("W samplers") {
  RngStream r(16);
  const auto d = sample_w(WSpec::dirac0(), 1000, r);
  CHECK(std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; }));
  for (double shape : {1.0, 3.0, 0.3}) {
    const WSpec w = shape == 1.0 ? WSpec::exponential1() : WSpec::gamma(shape);
    const auto v = sample_w(w, 1000000, r);
    const double se = std::sqrt(shape / v.size());
    CHECK(std::abs(oracle::mean(v) - shape) < 4.0 * se);
  }
}

TEST_CASE("gamma sampler against its distribution function") {
  for (double shape : {0.25, 1.0 / 3.0, 2.5}) {
    RngStream r(17);
    std::vector<double> v(20000);
    for (double& x : v) {
      x = sample_gamma(shape, r);
    }
    // lower incomplete gamma by series, independent of the library
    auto cdf = [shape](double x) {
      if (x <= 0.0) {
        return 0.0;
      }
      double term = 1.0 / shape, sum = term;
      for (int k = 1; k < 500 && term > 1e-17 * sum; ++k) {
        term *= x / (shape + k);
        sum += term;
      }
      return std::exp(shape * std::log(x) - x - std::lgamma(shape)) * sum;
    };
    CHECK(ks_test(v, cdf).p_value > 0.01);
  }
  RngStream r(1);
  CHECK_THROWS_AS(sample_gamma(0.0, r), ArgumentError);
}

TEST_CASE("Haar orthogonal matrices") {
  RngStream r(18);
  for (int n : {1, 2, 5, 12}) {
    const Eigen::MatrixXd q = sample_haar_orthogonal(n, r);
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(std::abs(q.determinant()) - 1.0) <= 1e-10);
  }
}

TEST_CASE("Haar angle is uniform at n = 2") {
  RngStream r(19);
  std::vector<std::size_t> bins(16, 0);
  for (int i = 0; i < 100000; ++i) {
    const Eigen::MatrixXd q = sample_haar_orthogonal(2, r);
    double angle = std::atan2(q(1, 0), q(0, 0));
    if (angle < 0.0) {
      angle += 2.0 * std::numbers::pi;
    }
    ++bins[std::min<std::size_t>(15, static_cast<std::size_t>(angle / (2.0 * std::numbers::pi) * 16.0))];
  }
  CHECK(chi_square_uniform(bins).p_value > 0.01);
}

TEST_CASE("Haar law is left invariant") {
  RngStream r(20);
  const Eigen::MatrixXd u = sample_haar_orthogonal(4, r);
  std::vector<double> plain, rotated;
  for (int i = 0; i < 20000; ++i) {
    plain.push_back(sample_haar_orthogonal(4, r)(0, 0));
    rotated.push_back((u * sample_haar_orthogonal(4, r))(0, 0));
  }
  CHECK(ks_test_two_sample(plain, rotated).p_value > 0.01);
}

}  // TEST_SUITE
