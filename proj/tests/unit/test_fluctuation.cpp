#include <doctest.h>

#include <cmath>

#include "lpproj/errors.hpp"
#include "lpproj/fluctuation.hpp"
#include "lpproj/special.hpp"
#include "oracles.hpp"

using namespace lpproj;

TEST_SUITE("fluctuation_lab") {

TEST_CASE("empirical distribution function") {
  const double v[] = {3.0, 1.0, 2.0};
  const EmpiricalCDF f = empirical_cdf(v);
  CHECK(f.count() == 3);
  CHECK(f.sorted_values() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(f(1.5) == doctest::Approx(1.0 / 3.0));
  CHECK(f(1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(f(3.0) == 1.0);
  CHECK(f(0.5) == 0.0);
  CHECK(f(-INFINITY) == 0.0);
  CHECK(f(INFINITY) == 1.0);
  CHECK_THROWS_AS(empirical_cdf(std::span<const double>()), ArgumentError);
}

TEST_CASE("Kolmogorov distance") {
  const double zero[] = {0.0};
  CHECK(kolmogorov_distance(empirical_cdf(zero), special::normal_cdf) == doctest::Approx(0.5).epsilon(1e-15));
  const double two[] = {-1.0, 1.0};
  CHECK(kolmogorov_distance(empirical_cdf(two), [](double t) { return t >= 0.0 ? 1.0 : 0.0; }) ==
        doctest::Approx(0.5));
  const double s[] = {0.1, 0.4, 0.4, 2.0};
  const EmpiricalCDF e = empirical_cdf(s);
  CHECK(kolmogorov_distance(e, [&](double t) { return e(t); }) == 0.0);
}

TEST_CASE("Kolmogorov distance matches brute force") {
  RngStream r(51);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> xs(60);
    for (double& x : xs) {
      // ties on purpose
      x = std::round(r.normal() * 4.0) / 4.0;
    }
    const auto g = [](double t) { return special::normal_cdf(t / 1.2); };
    REQUIRE(kolmogorov_distance(empirical_cdf(xs), g) == doctest::Approx(oracle::brute_ks(xs, g)).epsilon(1e-14));
  }
}

TEST_CASE("special functions against reference values") {
  CHECK(special::normal_cdf(-3) == doctest::Approx(0.0013498980316300933).epsilon(1e-13));
  CHECK(special::normal_cdf(1.2) == doctest::Approx(0.8849303297782918).epsilon(1e-14));
  CHECK(special::regularized_lower_gamma(0.5, 0.3) == doctest::Approx(0.5614219739190003).epsilon(1e-13));
  CHECK(special::regularized_lower_gamma(10, 7) == doctest::Approx(0.16950406276132673).epsilon(1e-12));
  CHECK(special::regularized_incomplete_beta(0.5, 3, 0.2) == doctest::Approx(0.733430296619931).epsilon(1e-13));
  CHECK(special::regularized_incomplete_beta(5, 1, 0.7) == doctest::Approx(0.16807).epsilon(1e-13));
  CHECK(special::kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  CHECK(special::kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(special::kolmogorov_survival(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-12));
  CHECK(special::kolmogorov_survival(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-11));
  CHECK(special::kolmogorov_survival(0.3) == doctest::Approx(0.9999906941986655).epsilon(1e-12));
  CHECK(special::chi_square_survival(1, 1) == doctest::Approx(0.31731050786291115).epsilon(1e-13));
  CHECK(special::chi_square_survival(20, 9) == doctest::Approx(0.017912404529843298).epsilon(1e-12));
  CHECK(special::chi_square_survival(5, 10) == doctest::Approx(0.8911780189141513).epsilon(1e-13));
}

TEST_CASE("limit distribution functions") {
  CHECK(limit_cdf(LimitLaw::gaussian(0.3), 0.0) == 0.5);
  CHECK(limit_cdf(LimitLaw::gaussian(0.25), 0.5) == doctest::Approx(special::normal_cdf(1.0)));
  CHECK(limit_cdf(LimitLaw::fixed_k_chi(1), 0.0) == doctest::Approx(0.6826894921370859).epsilon(1e-13));
  CHECK(limit_cdf(LimitLaw::fixed_k_chi(3), 0.5) == doctest::Approx(0.8268837995366463).epsilon(1e-13));
  CHECK(limit_cdf(LimitLaw::fixed_k_chi(3), -1.0) == doctest::Approx(0.0890631983984815).epsilon(1e-13));
  CHECK(limit_cdf(LimitLaw::fixed_k_chi(5), -0.2) == doctest::Approx(0.4713467646468829).epsilon(1e-13));
  CHECK(limit_cdf(LimitLaw::fixed_k_chi(4), -2.5) == 0.0);
  CHECK(limit_cdf(LimitLaw::point_mass(), -0.1) == 0.0);
  CHECK(limit_cdf(LimitLaw::point_mass(), 0.0) == 1.0);
  CHECK_THROWS_AS(LimitLaw::gaussian(0.0), ArgumentError);
  CHECK_THROWS_AS(LimitLaw::fixed_k_chi(0), ArgumentError);
}

TEST_CASE("Kolmogorov tests") {
  RngStream r(52);
  std::vector<double> g(5000), h(5000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = r.normal();
    h[i] = r.normal() + 0.2;
  }
  const auto good = ks_test(g, special::normal_cdf);
  CHECK(good.p_value == doctest::Approx(special::kolmogorov_survival(std::sqrt(5000.0) * good.statistic)).epsilon(0.05));
  CHECK(good.passes(0.01));
  CHECK_FALSE(ks_test(h, special::normal_cdf).passes(0.01));
  CHECK_FALSE(ks_test_two_sample(g, h).passes(0.01));
  const std::size_t even[] = {100, 100, 100, 100};
  CHECK(chi_square_uniform(even).statistic == 0.0);
  CHECK(chi_square_uniform(even).p_value == doctest::Approx(1.0));
}

TEST_CASE("Berry-Esseen envelope") {
  CHECK(berry_esseen_envelope(1000000, 10000, 0.01) == doctest::Approx(1.0));
  CHECK(berry_esseen_envelope(1000, 100, 0.1) == doctest::Approx(1.0));
  CHECK(berry_esseen_envelope(100, 100, 0.5) == doctest::Approx(0.5));
  CHECK(berry_esseen_envelope(100000, 10000, 0.0) == doctest::Approx(0.1));
}

TEST_CASE("k rules") {
  CHECK(KRule::parse("n^0.8").k_for(1024, 0.5) == 256);
  CHECK(KRule::parse("lambda").k_for(1001, 0.5) == 501);
  CHECK(KRule::parse("n").k_for(77, 0.5) == 77);
  CHECK(KRule::parse("const:3").k_for(4096, 0.5) == 3);
  CHECK(KRule::parse("5").k_for(4096, 0.5) == 5);
  CHECK(KRule::parse("n^0.8").limit_lambda(0.5) == 0.0);
  CHECK(KRule::parse("n").limit_lambda(0.5) == 1.0);
  CHECK(KRule::parse("lambda").limit_lambda(0.3) == 0.3);
  CHECK(KRule::parse(KRule::parse("n^0.75").to_string()).k_for(10000, 0.5) == 1000);
  CHECK_THROWS(KRule::parse("n^x"));
}

TEST_CASE("study is deterministic and flags degenerate cells") {
  CltStudySpec s;
  s.p = PExponent::finite(2.0);
  s.w = WSpec::dirac0();
  s.k_rule = KRule::parse("n");
  s.n_grid = {16, 64};
  s.samples = 2000;
  const auto rep = run_clt_study(s);
  CHECK(rep.any_degenerate());
  for (const auto& c : rep.cells) {
    CHECK(c.degenerate);
    CHECK(c.target.kind == LimitLaw::Kind::PointMass);
    CHECK(c.ks == 0.0);
  }

  CltStudySpec g;
  g.p = PExponent::finite(1.0);
  g.n_grid = {64, 256};
  g.samples = 5000;
  const auto a = run_clt_study(g);
  const auto b = run_clt_study(g);
  REQUIRE(a.cells.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.cells[i].ks == b.cells[i].ks);
    CHECK(a.cells[i].ks >= 0.0);
    CHECK(a.cells[i].ks <= 1.0);
    CHECK(a.cells[i].k == (i == 0 ? 32 : 128));
  }
  CHECK_FALSE(a.any_degenerate());
}

TEST_CASE("infeasible k rule names the cell") {
  CltStudySpec s;
  s.k_rule = KRule::parse("const:20");
  s.n_grid = {64, 10};
  s.samples = 1000;
  try {
    (void)run_clt_study(s);
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("10") != std::string::npos);
  }
}

TEST_CASE("fixed-k chi limit") {
  CltStudySpec s;
  s.p = PExponent::finite(2.0);
  s.k_rule = KRule::parse("const:3");
  s.n_grid = {1024};
  s.samples = 20000;
  const auto rep = run_clt_study(s);
  CHECK(rep.cells[0].target.kind == LimitLaw::Kind::FixedKChi);
  CHECK(rep.cells[0].ks < 0.03);
}

}  // TEST_SUITE
