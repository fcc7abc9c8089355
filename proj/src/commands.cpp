#include "lpproj/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "lpproj/ball_measures.hpp"
#include "lpproj/errors.hpp"
#include "lpproj/fluctuation.hpp"
#include "lpproj/ldp.hpp"
#include "lpproj/projection.hpp"
#include "lpproj/report_io.hpp"
#include "lpproj/util.hpp"
#include "lpproj/validation.hpp"

#ifndef LPPROJ_VERSION_STRING
#define LPPROJ_VERSION_STRING "unknown"
#endif

namespace lpproj {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string version_string() { return LPPROJ_VERSION_STRING; }

namespace {

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) {
    return "config";
  }
  if (dynamic_cast<const ArgumentError*>(&e) != nullptr) {
    return "argument";
  }
  if (dynamic_cast<const PreconditionError*>(&e) != nullptr) {
    return "precondition";
  }
  return "runtime";
}

// Runs one stage; failures are rethrown tagged with module and cell.
template <class F>
auto in_module(const std::string& module, const std::string& cell, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ModuleError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModuleError(module, cell, error_kind(e), e.what());
  }
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("out_dir", "cannot create directory " + dir.string());
  }
  const fs::path probe = dir / ".lpproj_write_probe";
  {
    std::ofstream f(probe);
    if (!f) {
      throw ConfigError("out_dir", "directory not writable: " + dir.string());
    }
  }
  fs::remove(probe, ec);
}

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  void write(const std::string& name, const std::string& content) {
    report::write_file(dir_ / name, content);
    files_.push_back(dir_ / name);
  }
  const std::vector<fs::path>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

std::string cell_label(long n, long k = -1) {
  std::string s = "n=" + std::to_string(n);
  if (k >= 0) {
    s += ",k=" + std::to_string(k);
  }
  return s;
}

ProjectionSpec projection_spec(const StudyConfig& c, long n) {
  ProjectionSpec s;
  s.n = n;
  s.k = c.k_rule.value().k_for(n, c.lambda);
  s.p = c.p;
  s.w = c.w;
  s.method = c.method;
  s.conv = c.conv;
  return s;
}

void run_sample(const StudyConfig& c, OutputSet& out, std::ostream& log) {
  const long n = c.n_grid.front();
  const std::size_t count = c.samples_for(0);
  if (c.sample_kind == SampleKind::Ball) {
    const BallMeasureSpec spec{n, c.p, c.w, c.conv};
    RngStream rng(c.seed, 0);
    const BallPointBatch batch = in_module("ball_measures", cell_label(n), [&] {
      spec.validate();
      return sample_ball_point(spec, count, rng);
    });
    out.write("samples.csv", report::ball_batch_csv(batch));
    out.write("samples.json", report::ball_batch_json(batch));
    log << "sampled " << count << " points of the n=" << n << " ball measure\n";
    return;
  }
  const ProjectionSpec spec = projection_spec(c, n);
  const StatisticKind kind = c.sample_kind == SampleKind::RawNorm ? StatisticKind::RawNorm : StatisticKind::CenteredX;
  const StatSampleBatch batch = in_module("projection_stats", cell_label(n, spec.k), [&] {
    spec.validate();
    return sample_statistic(spec, kind, count, RngStream(c.seed, 0), BatchPlan{c.substreams, c.workers});
  });
  out.write("samples.csv", report::stat_batch_csv(batch));
  out.write("samples.json", report::stat_batch_json(batch));
  log << "sampled " << count << " values of " << to_string(kind) << " (n=" << n << ", k=" << spec.k << ")\n";
}

ConvergenceReport run_convergence(const StudyConfig& c, OutputSet& out, std::ostream& log) {
  CltStudySpec spec;
  spec.p = c.p;
  spec.w = c.w;
  spec.lambda = c.lambda;
  spec.k_rule = c.k_rule.value();
  spec.lambda_mode = c.lambda_mode;
  spec.n_grid = c.n_grid;
  spec.samples = c.samples_for(0);
  if (c.samples.size() > 1) {
    throw ConfigError("samples", "clt-study uses one sample count for all cells");
  }
  spec.seed = c.seed;
  spec.workers = c.workers;
  spec.substreams = c.substreams;
  spec.variant = c.variant;
  spec.conv = c.conv;
  spec.method = c.method;
  const ConvergenceReport report = in_module("fluctuation_lab", "", [&] { return run_clt_study(spec); });
  out.write("report.json", report::convergence_json(report));
  out.write("report.csv", report::convergence_csv(report));
  out.write("plot_ks.csv", report::convergence_plot_ks_csv(report));
  out.write("plot_envelope.csv", report::convergence_plot_envelope_csv(report));
  out.write("timing.csv", report::convergence_timing_csv(report));

  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-10s %-28s %-10s %s\n", "n", "k", "target", "ks", "envelope");
  log << line;
  for (const ConvergenceCell& cell : report.cells) {
    std::snprintf(line, sizeof line, "%-10ld %-10ld %-28s %-10.6f %.6g\n", cell.n, cell.k,
                  cell.target.to_string().c_str(), cell.ks, cell.envelope);
    log << line;
  }
  log << "fitted envelope constant: " << format_real(report.fitted_envelope_constant()) << "\n";
  if (report.any_degenerate()) {
    log << "degenerate limit (sigma^2 = 0) in at least one cell\n";
  }
  return report;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) {
    v.push_back(a + (b - a) * i / (count - 1));
  }
  return v;
}

void run_ldp_rates(const StudyConfig& c, OutputSet& out, std::ostream& log) {
  std::vector<RateGrid> grids;
  const double pv = c.p.value();
  const std::vector<double> t1 = linspace(-1.0, 0.25, 6);
  const std::vector<double> t2 = linspace(-1.0, 0.8 / pv, 6);
  grids.push_back(in_module("ldp_toolkit", "cumulant", [&] { return tabulate_cumulant(c.p, t1, t2); }));
  out.write("cumulant.csv", report::rate_grid_csv(grids.back()));
  if (pv >= 2.0) {
    grids.push_back(in_module("ldp_toolkit", "rate_jp", [&] { return tabulate_rate_jp(c.p, c.y_grid); }));
    out.write("rate_jp.csv", report::rate_grid_csv(grids.back()));
  } else {
    grids.push_back(
        in_module("ldp_toolkit", "rate_i2", [&] { return tabulate_rate_i2(c.p, c.lambda, c.y_grid, c.m_variant); }));
    out.write("rate_i2.csv", report::rate_grid_csv(grids.back()));
  }
  grids.push_back(in_module("ldp_toolkit", "rate_w", [&] { return tabulate_rate_w(c.w, linspace(0.0, 2.0, 9)); }));
  out.write("rate_w.csv", report::rate_grid_csv(grids.back()));
  out.write("rates.json", report::rate_grids_json(grids));
  for (const RateGrid& g : grids) {
    log << g.label << ": " << g.size() << " values, convexity certificate";
    for (bool b : g.convexity_certificate) {
      log << ' ' << (b ? "yes" : "no");
    }
    log << "\n";
  }
}

void run_tail_rates(const StudyConfig& c, OutputSet& out, std::ostream& log) {
  TailRateSpec spec;
  spec.p = c.p;
  spec.lambda = c.lambda;
  spec.w = c.w;
  spec.y = c.y.value();
  spec.n_grid = c.n_grid;
  spec.samples = c.samples;
  spec.seed = c.seed;
  spec.substreams = c.substreams;
  spec.workers = c.workers;
  spec.conv = c.conv;
  std::vector<RateGrid> grids;
  grids.push_back(in_module("ldp_toolkit", "tail-rates", [&] { return empirical_tail_rate(spec); }));
  out.write("tail_rates.csv", report::rate_grid_csv(grids.back()));
  if (c.p.value() < 2.0) {
    grids.push_back(in_module("ldp_toolkit", "rate_i2", [&] {
      return tabulate_rate_i2(c.p, c.lambda, std::vector<double>{spec.y}, c.m_variant);
    }));
    log << "reference rate at y=" << format_real(spec.y) << ": " << grids.back().values[0].to_string() << "\n";
  }
  out.write("tail_rates.json", report::rate_grids_json(grids));
  const RateGrid& g = grids.front();
  for (std::size_t i = 0; i < g.size(); ++i) {
    log << "n=" << format_real(g.axes[0][i]) << "  rate=" << g.values[i].to_string() << "  ["
        << format_real(g.lower[i]) << ", " << format_real(g.upper[i]) << "]" << (g.flags[i].empty() ? "" : "  ")
        << g.flags[i] << "\n";
  }
}

int run_validate(const StudyConfig& c, OutputSet& out, std::ostream& log) {
  const std::vector<CheckResult> results = run_validation(c.workers);
  std::string csv = "suite,check,status,detail\n";
  ordered_json j;
  j["schema_version"] = report::kSchemaVersion;
  j["kind"] = "validation";
  ordered_json list = ordered_json::array();
  bool all = true;
  for (const CheckResult& r : results) {
    std::string detail = r.detail;
    for (char& ch : detail) {
      if (ch == ',' || ch == '\n') {
        ch = ';';
      }
    }
    csv += r.suite + "," + r.name + "," + (r.passed ? "pass" : "fail") + "," + detail + "\n";
    list.push_back({{"suite", r.suite}, {"check", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
  }
  j["checks"] = list;
  j["all_passed"] = all;
  out.write("validate.csv", csv);
  out.write("validate.json", j.dump(2) + "\n");
  log << validation_table(results);
  return all ? 0 : 1;
}

}  // namespace

CommandOutcome execute(const StudyConfig& config, std::ostream& log) {
  config.validate();
  ensure_writable(config.out_dir);
  const auto start = std::chrono::steady_clock::now();
  OutputSet out(config.out_dir);
  CommandOutcome outcome;
  std::optional<ConvergenceReport> convergence;
  switch (config.command) {
    case Command::Sample:
      run_sample(config, out, log);
      break;
    case Command::CltStudy:
    case Command::BerryEsseen:
      convergence = run_convergence(config, out, log);
      outcome.degenerate = convergence->any_degenerate();
      break;
    case Command::LdpRates:
      run_ldp_rates(config, out, log);
      break;
    case Command::TailRates:
      run_tail_rates(config, out, log);
      break;
    case Command::Validate:
      outcome.exit_code = run_validate(config, out, log);
      break;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ordered_json m;
  m["schema_version"] = report::kSchemaVersion;
  m["kind"] = "manifest";
  m["command"] = to_string(config.command);
  m["status"] = outcome.exit_code == 0 ? "ok" : "checks-failed";
  m["config"] = nlohmann::json::parse(config_json(config));
  m["config_hash"] = config_hash(config);
  m["seed"] = config.seed;
  m["workers"] = config.workers;
  m["version"] = version_string();
  m["wall_time_seconds"] = seconds;
  if (convergence) {
    m["degenerate"] = outcome.degenerate;
    ordered_json cells = ordered_json::array();
    for (const ConvergenceCell& cell : convergence->cells) {
      cells.push_back({{"n", cell.n}, {"k", cell.k}, {"degenerate", cell.degenerate}, {"seconds", cell.seconds}});
    }
    m["cells"] = cells;
  }
  ordered_json files = ordered_json::array();
  for (const fs::path& f : out.files()) {
    files.push_back(f.filename().string());
  }
  m["outputs"] = files;
  out.write("manifest.json", m.dump(2) + "\n");
  outcome.outputs = out.files();
  log << "wrote " << outcome.outputs.size() << " files to " << config.out_dir.string() << "\n";
  return outcome;
}

std::string error_json(const std::exception& e) {
  ordered_json j;
  j["status"] = "error";
  if (const auto* me = dynamic_cast<const ModuleError*>(&e)) {
    j["kind"] = me->kind();
    j["module"] = me->module();
    if (!me->cell().empty()) {
      j["cell"] = me->cell();
    }
  } else if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    j["kind"] = "config";
    j["module"] = "cli_runner";
    if (!ce->field().empty()) {
      j["field"] = ce->field();
    }
  } else {
    j["kind"] = error_kind(e);
    j["module"] = "cli_runner";
  }
  j["message"] = e.what();
  return j.dump();
}

int run_command(const StudyConfig& config, std::ostream& out, std::ostream& err) {
  int code = 0;
  std::string text;
  try {
    return execute(config, out).exit_code;
  } catch (const ConfigError& e) {
    text = error_json(e);
    code = 2;
  } catch (const std::exception& e) {
    text = error_json(e);
    code = 3;
  }
  err << text << "\n";
  try {
    if (!config.out_dir.empty() && fs::is_directory(config.out_dir)) {
      report::write_file(config.out_dir / "error.json", text + "\n");
    }
  } catch (const std::exception&) {
    // the error already went to err
  }
  return code;
}

}  // namespace lpproj
