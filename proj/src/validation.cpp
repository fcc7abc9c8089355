#include "lpproj/validation.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include <Eigen/Dense>

#include "lpproj/ball_measures.hpp"
#include "lpproj/commands.hpp"
#include "lpproj/config.hpp"
#include "lpproj/errors.hpp"
#include "lpproj/fluctuation.hpp"
#include "lpproj/ldp.hpp"
#include "lpproj/moments.hpp"
#include "lpproj/projection.hpp"
#include "lpproj/report_io.hpp"
#include "lpproj/rng.hpp"
#include "lpproj/sampling.hpp"
#include "lpproj/special.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool passed;
  std::string detail;
};

using Check = std::function<Verdict()>;

struct Registry {
  std::vector<CheckResult> results;

  void run(const std::string& suite, const std::string& name, const Check& check) {
    CheckResult r{suite, name, false, ""};
    try {
      const Verdict v = check();
      r.passed = v.passed;
      r.detail = v.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
    results.push_back(std::move(r));
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(4) << x;
  return s.str();
}

Verdict within(double value, double target, double tol, const std::string& what = "value") {
  const double err = std::abs(value - target);
  return {err <= tol, what + " " + fmt(value) + " vs " + fmt(target) + " (|err| " + fmt(err) + ")"};
}

// |mean - target| <= 5 standard errors
Verdict mean_matches(const std::vector<double>& xs, double target) {
  CompensatedSum s, s2;
  for (double x : xs) {
    s += x;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = s.value() / n;
  for (double x : xs) {
    s2 += (x - mean) * (x - mean);
  }
  const double se = std::sqrt(s2.value() / (n - 1.0) / n);
  const double z = (mean - target) / se;
  return {std::abs(z) <= 5.0, "mean " + fmt(mean) + " vs " + fmt(target) + " (z " + fmt(z) + ")"};
}

Verdict p_value_ok(const KsTestResult& r) {
  return {r.passes(1e-3), "D " + fmt(r.statistic) + ", p " + fmt(r.p_value)};
}

void core_sampling(Registry& reg) {
  const std::string suite = "core_sampling";
  reg.run(suite, "stream determinism", [] {
    RngStream a(7, 3), b(7, 3);
    for (int i = 0; i < 1000; ++i) {
      if (a.next_u64() != b.next_u64()) {
        return Verdict{false, "sequences diverge"};
      }
    }
    RngStream c = RngStream(7, 3).split(0), d = RngStream(7, 3).split(1);
    int equal = 0;
    for (int i = 0; i < 1000; ++i) {
      equal += c.next_u64() == d.next_u64() ? 1 : 0;
    }
    return Verdict{equal == 0, std::to_string(equal) + " collisions between sibling substreams"};
  });
  reg.run(suite, "uniform chi-square (16 bins)", [] {
    RngStream rng(11);
    std::vector<std::size_t> counts(16, 0);
    for (int i = 0; i < 100000; ++i) {
      ++counts[static_cast<std::size_t>(rng.uniform() * 16.0)];
    }
    const ChiSquareResult r = chi_square_uniform(counts);
    return Verdict{r.p_value >= 1e-3, "chi2 " + fmt(r.statistic) + ", p " + fmt(r.p_value)};
  });
  for (double shape : {0.5, 1.0, 2.5}) {
    reg.run(suite, "gamma mean, shape " + fmt(shape), [shape] {
      RngStream rng(12);
      std::vector<double> xs(100000);
      for (double& x : xs) {
        x = sample_gamma(shape, rng);
      }
      return mean_matches(xs, shape);
    });
  }
  for (double p : {1.0, 3.0}) {
    reg.run(suite, "E|Z|^p = 1 under the exp(-|x|^p/p) density, p " + fmt(p), [p] {
      RngStream rng(13);
      std::vector<double> z = sample_pgauss(PExponent::finite(p), ScaleConvention::PaperDensity, 100000, rng);
      for (double& v : z) {
        v = std::pow(std::abs(v), p);
      }
      return mean_matches(z, 1.0);
    });
  }
  reg.run(suite, "Haar matrix orthogonal", [] {
    RngStream rng(14);
    const Eigen::MatrixXd q = sample_haar_orthogonal(8, rng);
    const double err = (q.transpose() * q - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff();
    return Verdict{err <= 1e-12, "max |Q^T Q - I| " + fmt(err)};
  });
}

void moments(Registry& reg) {
  const std::string suite = "moments";
  for (double pv : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    reg.run(suite, "closed-form identities, p " + fmt(pv), [pv] {
      const PExponent p = PExponent::finite(pv);
      const double m2 = abs_moment(p, 2.0);
      double worst = 0.0;
      worst = std::max(worst, std::abs(abs_moment(p, pv) - 1.0));
      worst = std::max(worst, std::abs(abs_moment(p, 2.0 * pv) - (pv + 1.0)));
      worst = std::max(worst, std::abs(abs_moment(p, pv + 2.0) - 3.0 * m2));
      worst = std::max(worst, std::abs(abs_moment_variance(p, 2.0) - (abs_moment(p, 4.0) - m2 * m2)));
      return Verdict{worst <= 1e-12, "max deviation " + fmt(worst)};
    });
  }
  reg.run(suite, "variance vanishes at p=2, lambda=1", [] {
    const double v = clt_variance(PExponent::finite(2.0), 1.0);
    const double printed = clt_variance(PExponent::finite(2.0), 1.0, VarianceVariant::PrintedClosedForm);
    return Verdict{std::abs(v) <= 1e-12 && std::abs(printed - 0.75) <= 1e-12,
                   "moment-based " + fmt(v) + ", printed " + fmt(printed)};
  });
  reg.run(suite, "variance at p=1 is 1/2 - lambda/4", [] {
    double worst = 0.0;
    for (double l : {0.0, 0.3, 1.0}) {
      worst = std::max(worst, std::abs(clt_variance(PExponent::finite(1.0), l) - (0.5 - 0.25 * l)));
    }
    return Verdict{worst <= 1e-12, "max deviation " + fmt(worst)};
  });
  reg.run(suite, "variance continuous at p = inf", [] {
    double worst = 0.0;
    for (double l : {0.0, 0.25, 0.5, 1.0}) {
      worst = std::max(worst, std::abs(clt_variance(PExponent::finite(1e4), l) - (0.5 - 0.3 * l)));
    }
    return Verdict{worst <= 1e-3, "max deviation " + fmt(worst)};
  });
}

void ball_measures(Registry& reg) {
  const std::string suite = "ball_measures";
  reg.run(suite, "points lie in the unit ball", [] {
    RngStream rng(21);
    const BallMeasureSpec spec{6, PExponent::finite(3.0), WSpec::gamma(2.0), ScaleConvention::UnitDensity};
    const BallPointBatch batch = sample_ball_point(spec, 2000, rng);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < batch.points.rows(); ++i) {
      worst = std::max(worst, lp_norm(std::span<const double>(batch.points.row(i).data(), 6), spec.p));
    }
    return Verdict{worst < 1.0, "max norm " + fmt(worst)};
  });
  reg.run(suite, "radial law is Beta(n/p, alpha)", [] {
    RngStream rng(22);
    const BallMeasureSpec spec{6, PExponent::finite(3.0), WSpec::gamma(2.0), ScaleConvention::UnitDensity};
    const BallPointBatch batch = sample_ball_point(spec, 20000, rng);
    std::vector<double> r(static_cast<std::size_t>(batch.points.rows()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double norm = lp_norm(std::span<const double>(batch.points.row(static_cast<Eigen::Index>(i)).data(), 6),
                                  spec.p);
      r[i] = std::pow(norm, 3.0);
    }
    return p_value_ok(ks_test(r, [](double x) { return special::regularized_incomplete_beta(2.0, 2.0, x); }));
  });
  reg.run(suite, "mixture density of W = Exp(1) is 1", [] {
    const double h = mixture_density_h(0.4, 5, PExponent::finite(2.5), WSpec::exponential1());
    return within(h, 1.0, 1e-14, "h(0.4)");
  });
}

void projection_stats(Registry& reg, std::size_t workers) {
  const std::string suite = "projection_stats";
  reg.run(suite, "representation matches direct Haar", [workers] {
    ProjectionSpec spec{8, 3, PExponent::finite(3.5), WSpec::exponential1(), ProjectionMethod::Representation,
                        ScaleConvention::UnitDensity};
    const BatchPlan plan{4, workers};
    const StatSampleBatch rep = sample_statistic(spec, StatisticKind::RawNorm, 20000, RngStream(31, 1), plan);
    spec.method = ProjectionMethod::DirectHaar;
    const StatSampleBatch dir = sample_statistic(spec, StatisticKind::RawNorm, 20000, RngStream(31, 2), plan);
    return p_value_ok(ks_test_two_sample(rep.values, dir.values));
  });
  reg.run(suite, "exact degeneracy at p=2, Dirac0, k=n", [] {
    const ProjectionSpec spec{64, 64, PExponent::finite(2.0), WSpec::dirac0(), ProjectionMethod::Representation,
                              ScaleConvention::UnitDensity};
    const StatSampleBatch b = sample_statistic(spec, StatisticKind::CenteredX, 2000, RngStream(32));
    double worst = 0.0;
    for (double v : b.values) {
      worst = std::max(worst, std::abs(v));
    }
    return Verdict{worst <= 1e-12, "max |X| " + fmt(worst)};
  });
  reg.run(suite, "batches independent of worker count", [] {
    const ProjectionSpec spec{32, 16, PExponent::finite(1.0), WSpec::gamma(2.0), ProjectionMethod::Representation,
                              ScaleConvention::UnitDensity};
    const StatSampleBatch a = sample_statistic(spec, StatisticKind::CenteredX, 5000, RngStream(33), {4, 1});
    const StatSampleBatch b = sample_statistic(spec, StatisticKind::CenteredX, 5000, RngStream(33), {4, 3});
    return Verdict{a.values == b.values, a.values == b.values ? "identical" : "differ"};
  });
}

void fluctuation_lab(Registry& reg, std::size_t workers) {
  const std::string suite = "fluctuation_lab";
  reg.run(suite, "KS accepts a normal sample against Phi", [] {
    RngStream rng(41);
    std::vector<double> xs(20000);
    for (double& x : xs) {
      x = rng.normal();
    }
    return p_value_ok(ks_test(xs, [](double t) { return special::normal_cdf(t); }));
  });
  reg.run(suite, "Kolmogorov survival at 1.36", [] {
    return within(special::kolmogorov_survival(1.36), 0.049, 1e-3, "Q(1.36)");
  });
  reg.run(suite, "k rule n^0.8 at n=1024", [] {
    const long k = KRule::parse("n^0.8").k_for(1024, 0.5);
    return Verdict{k == 256, "k " + std::to_string(k)};
  });
  reg.run(suite, "small CLT study, p=2, Gamma(2)", [workers] {
    CltStudySpec spec;
    spec.p = PExponent::finite(2.0);
    spec.w = WSpec::gamma(2.0);
    spec.n_grid = {256, 4096};
    spec.samples = 20000;
    spec.seed = 42;
    spec.workers = workers;
    const ConvergenceReport r = run_clt_study(spec);
    // the exact law is still 0.07 from the limit at n = 256 and 0.018 at 4096
    return Verdict{r.cells[1].ks < r.cells[0].ks && r.cells[1].ks <= 0.04,
                   "ks " + fmt(r.cells[0].ks) + " -> " + fmt(r.cells[1].ks)};
  });
}

void ldp_toolkit(Registry& reg) {
  const std::string suite = "ldp_toolkit";
  for (double pv : {2.0, 3.0, 4.0}) {
    reg.run(suite, "cumulant along t2 axis, p " + fmt(pv), [pv] {
      const PExponent p = PExponent::finite(pv);
      double worst = std::abs(cumulant_ip(p, 0.0, 0.0).value());
      for (double t2 : {-1.0, -0.1, 0.5 / pv}) {
        worst = std::max(worst, std::abs(cumulant_ip(p, 0.0, t2).value() + std::log(1.0 - pv * t2) / pv));
      }
      return Verdict{worst <= 1e-8, "max deviation " + fmt(worst)};
    });
    reg.run(suite, "cumulant gradient at 0, p " + fmt(pv), [pv] {
      const PExponent p = PExponent::finite(pv);
      const double h = 1e-5;
      const double g1 = (cumulant_ip(p, h, 0.0).value() - cumulant_ip(p, -h, 0.0).value()) / (2 * h);
      const double g2 = (cumulant_ip(p, 0.0, h).value() - cumulant_ip(p, 0.0, -h).value()) / (2 * h);
      const double err = std::max(std::abs(g1 - abs_moment(p, 2.0)), std::abs(g2 - 1.0));
      return Verdict{err <= 1e-6, "max deviation " + fmt(err)};
    });
    reg.run(suite, "cumulant grid convex, p " + fmt(pv), [pv] {
      const RateGrid g = tabulate_cumulant(PExponent::finite(pv), {-1.0, -0.6, -0.2, 0.0, 0.1, 0.2},
                                           {-1.0, -0.5, -0.2, 0.0, 0.1, 0.2});
      const bool ok = g.convexity_certificate.at(0) && g.convexity_certificate.at(1);
      return Verdict{ok, ok ? "both axes certified" : "certificate failed"};
    });
  }
  reg.run(suite, "conjugate of |t|^2/2 is |x|^2/2", [] {
    const ConvexFunction f = [](std::span<const double> t) { return ExtReal(0.5 * (t[0] * t[0] + t[1] * t[1])); };
    const double x[2] = {1.3, -0.7};
    return within(fenchel_conjugate(f, x).value.value(), 0.5 * (1.69 + 0.49), 1e-7);
  });
  reg.run(suite, "conjugate of |t| is the indicator of [-1, 1]", [] {
    const ConvexFunction f = [](std::span<const double> t) { return ExtReal(std::abs(t[0])); };
    const double inside = 0.6, outside = 1.4;
    const ExtReal a = fenchel_conjugate(f, std::span<const double>(&inside, 1)).value;
    const ExtReal b = fenchel_conjugate(f, std::span<const double>(&outside, 1)).value;
    return Verdict{a.is_finite() && std::abs(a.value()) <= 1e-7 && b.is_infinite(),
                   "f*(0.6) " + a.to_string() + ", f*(1.4) " + b.to_string()};
  });
  reg.run(suite, "Fenchel equality at (-0.1, 0.05), p=2", [] {
    const PExponent p = PExponent::finite(2.0);
    const double t1 = -0.1, t2 = 0.05, h = 1e-5;
    const double f = cumulant_ip(p, t1, t2).value();
    const double g1 = (cumulant_ip(p, t1 + h, t2).value() - cumulant_ip(p, t1 - h, t2).value()) / (2 * h);
    const double g2 = (cumulant_ip(p, t1, t2 + h).value() - cumulant_ip(p, t1, t2 - h).value()) / (2 * h);
    const double residual = cumulant_conjugate(p, g1, g2).value.value() + f - (t1 * g1 + t2 * g2);
    return Verdict{std::abs(residual) <= 1e-6, "residual " + fmt(residual)};
  });
  reg.run(suite, "J_2 vanishes at the law-of-large-numbers point", [] {
    const PExponent p = PExponent::finite(2.0);
    const RateEvaluation r = rate_jp(p, std::sqrt(abs_moment(p, 2.0)));
    return Verdict{r.value.is_finite() && r.value.value() <= 1e-5, "J " + r.value.to_string()};
  });
  reg.run(suite, "I_2 boundary and closed form", [] {
    const PExponent p = PExponent::finite(1.0);
    const double m = ldp_m_constant(p);
    const ExtReal at = rate_i2(p, 1.0, std::sqrt(m));
    const ExtReal below = rate_i2(p, 1.0, 0.9 * std::sqrt(m));
    const ExtReal two = rate_i2(p, 1.0, 2.0);
    const bool ok = at == ExtReal(0.0) && below.is_infinite() && std::abs(two.value() - std::sqrt(2.0)) <= 1e-14;
    return Verdict{ok, "I(y*) " + at.to_string() + ", below " + below.to_string() + ", I(2) " + two.to_string()};
  });
  reg.run(suite, "W rates", [] {
    const bool ok = rate_w(WSpec::exponential1(), 0.7) == ExtReal(0.7) && rate_w(WSpec::gamma(5.0), 0.7) == ExtReal(0.7) &&
                    rate_w(WSpec::dirac0(), 0.0) == ExtReal(0.0) && rate_w(WSpec::dirac0(), 0.1).is_infinite();
    return Verdict{ok, ok ? "linear / point rates as expected" : "mismatch"};
  });
}

void cli_runner(Registry& reg, std::size_t workers) {
  const std::string suite = "cli_runner";
  reg.run(suite, "defaults filled from minimal flags", [] {
    StudyConfig c = resolve(config_from_pairs({{"command", "clt-study"}, {"p", "2"}, {"n", "1024"}}));
    const bool ok = c.lambda == 0.5 && c.samples == std::vector<std::size_t>{100000} && c.seed == 0 &&
                    c.variant == VarianceVariant::MomentBased && c.conv == ScaleConvention::UnitDensity;
    return Verdict{ok, "lambda " + fmt(c.lambda) + ", samples " + std::to_string(c.samples[0])};
  });
  reg.run(suite, "unknown key suggests a close one", [] {
    try {
      (void)config_from_pairs({{"lamda", "0.3"}});
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      const bool ok = msg.find("lamda") != std::string::npos && msg.find("\"lambda\"") != std::string::npos;
      return Verdict{ok, msg};
    }
    return Verdict{false, "accepted an unknown key"};
  });
  reg.run(suite, "n-grid must increase", [] {
    try {
      (void)resolve(config_from_pairs({{"command", "clt-study"}, {"n", "1024,256"}}));
    } catch (const ConfigError& e) {
      return Verdict{e.field() == "n", e.what()};
    }
    return Verdict{false, "accepted a decreasing grid"};
  });
  reg.run(suite, "config JSON round trip", [] {
    const StudyConfig c = resolve(config_from_pairs(
        {{"command", "tail-rates"}, {"p", "1"}, {"lambda", "1"}, {"n", "64,128"}, {"samples", "5000"}}));
    const StudyConfig back = resolve(config_from_json_text(config_json(c)));
    return Verdict{config_json(c) == config_json(back) && config_hash(c) == config_hash(back),
                   "hash " + config_hash(c)};
  });
  reg.run(suite, "CSV schemas and manifest re-run", [workers] {
    const fs::path dir = fs::temp_directory_path() / ("lpproj_validate_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    StudyConfig c = resolve(config_from_pairs({{"command", "clt-study"},
                                               {"n", "16,32"},
                                               {"samples", "1000"},
                                               {"workers", std::to_string(workers)},
                                               {"out_dir", (dir / "a").string()}}));
    std::ostringstream sink;
    (void)execute(c, sink);
    std::string detail;
    bool ok = true;
    for (const auto& [file, kind] : std::vector<std::pair<std::string, std::string>>{
             {"report.csv", "convergence"}, {"plot_ks.csv", "plot-ks"}, {"plot_envelope.csv", "plot-envelope"},
             {"timing.csv", "timing"}}) {
      if (report::csv_header(report::read_file(dir / "a" / file)) != report::csv_columns(kind)) {
        ok = false;
        detail += file + " header differs; ";
      }
    }
    StudyConfig again = resolve(load_manifest_config(dir / "a" / "manifest.json"));
    again.out_dir = dir / "b";
    (void)execute(again, sink);
    for (const char* file : {"report.json", "report.csv", "plot_ks.csv", "plot_envelope.csv"}) {
      if (report::read_file(dir / "a" / file) != report::read_file(dir / "b" / file)) {
        ok = false;
        detail += std::string(file) + " not reproduced; ";
      }
    }
    fs::remove_all(dir);
    return Verdict{ok, ok ? "headers fixed, re-run byte-identical" : detail};
  });
}

}  // namespace

std::vector<CheckResult> run_validation(std::size_t workers) {
  Registry reg;
  core_sampling(reg);
  moments(reg);
  ball_measures(reg);
  projection_stats(reg, workers);
  fluctuation_lab(reg, workers);
  ldp_toolkit(reg);
  cli_runner(reg, workers);
  return reg.results;
}

std::string validation_table(const std::vector<CheckResult>& results) {
  std::size_t suite_w = 5, name_w = 5;
  for (const CheckResult& r : results) {
    suite_w = std::max(suite_w, r.suite.size());
    name_w = std::max(name_w, r.name.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(suite_w + 2)) << "suite" << std::setw(static_cast<int>(name_w + 2))
      << "check" << std::setw(8) << "status" << "detail\n";
  std::size_t failed = 0;
  for (const CheckResult& r : results) {
    out << std::left << std::setw(static_cast<int>(suite_w + 2)) << r.suite << std::setw(static_cast<int>(name_w + 2))
        << r.name << std::setw(8) << (r.passed ? "pass" : "FAIL") << r.detail << "\n";
    failed += r.passed ? 0 : 1;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return out.str();
}

}  // namespace lpproj
