#include "lpproj/report_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lpproj/errors.hpp"
#include "lpproj/util.hpp"

namespace lpproj::report {

using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) {
      line += ',';
    }
    line += cells[i];
  }
  line += '\n';
  return line;
}

// JSON has no infinity; rates use the string "inf".
ordered_json real_json(double x) {
  if (std::isfinite(x)) {
    return x;
  }
  return format_real(x);
}

ordered_json ext_json(const ExtReal& v) { return v.is_infinite() ? ordered_json("inf") : ordered_json(v.value()); }

ordered_json provenance_json(const Provenance& prov) {
  return {{"seed", prov.seed}, {"stream_id", prov.stream_id}};
}

ordered_json projection_spec_json(const ProjectionSpec& spec) {
  return {{"n", spec.n},
          {"k", spec.k},
          {"p", spec.p.to_string()},
          {"w", spec.w.to_string()},
          {"method", to_string(spec.method)},
          {"convention", to_string(spec.conv)}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

const std::vector<std::string>& csv_columns(std::string_view kind) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> table{
      {"stat-batch", {"value"}},
      {"convergence", {"n", "k", "p", "w", "variant", "target", "ks", "envelope"}},
      {"plot-ks", {"n", "ks"}},
      {"plot-envelope", {"n", "envelope"}},
      {"timing", {"n", "k", "seconds"}},
      {"validate", {"suite", "check", "status", "detail"}},
  };
  const auto it = table.find(kind);
  if (it == table.end()) {
    throw ArgumentError("no fixed CSV schema for '" + std::string(kind) + "'");
  }
  return it->second;
}

std::vector<std::string> rate_grid_columns(const RateGrid& grid) {
  std::vector<std::string> cols = grid.axis_names;
  cols.emplace_back("value");
  if (!grid.lower.empty()) {
    cols.emplace_back("lower");
    cols.emplace_back("upper");
  }
  cols.emplace_back("flag");
  return cols;
}

std::vector<std::string> ball_batch_columns(long n) {
  std::vector<std::string> cols;
  for (long i = 1; i <= n; ++i) {
    cols.push_back("x" + std::to_string(i));
  }
  return cols;
}

std::string ball_batch_csv(const BallPointBatch& batch) {
  std::string out = join(ball_batch_columns(batch.spec.n));
  std::vector<std::string> row(static_cast<std::size_t>(batch.spec.n));
  for (Eigen::Index i = 0; i < batch.points.rows(); ++i) {
    for (Eigen::Index j = 0; j < batch.points.cols(); ++j) {
      row[static_cast<std::size_t>(j)] = format_real(batch.points(i, j));
    }
    out += join(row);
  }
  return out;
}

std::string ball_batch_json(const BallPointBatch& batch) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "ball-batch";
  j["spec"] = {{"n", batch.spec.n},
               {"p", batch.spec.p.to_string()},
               {"w", batch.spec.w.to_string()},
               {"convention", to_string(batch.spec.conv)}};
  j["count"] = batch.points.rows();
  j["provenance"] = provenance_json(batch.provenance);
  return dump(j);
}

std::string stat_batch_csv(const StatSampleBatch& batch) {
  std::string out = join(csv_columns("stat-batch"));
  for (double v : batch.values) {
    out += format_real(v);
    out += '\n';
  }
  return out;
}

std::string stat_batch_json(const StatSampleBatch& batch) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "stat-batch";
  j["statistic"] = to_string(batch.kind);
  j["spec"] = projection_spec_json(batch.spec);
  j["count"] = batch.values.size();
  j["substreams"] = batch.substreams;
  j["provenance"] = provenance_json(batch.provenance);
  return dump(j);
}

std::string convergence_json(const ConvergenceReport& report) {
  const CltStudySpec& s = report.spec;
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "convergence-report";
  std::vector<long> grid(s.n_grid.begin(), s.n_grid.end());
  j["spec"] = {{"p", s.p.to_string()},
               {"w", s.w.to_string()},
               {"lambda", s.lambda},
               {"k_rule", s.k_rule.to_string()},
               {"lambda_mode", to_string(s.lambda_mode)},
               {"n_grid", grid},
               {"samples", s.samples},
               {"seed", s.seed},
               {"substreams", s.substreams},
               {"variant", to_string(s.variant)},
               {"convention", to_string(s.conv)},
               {"method", to_string(s.method)}};
  ordered_json cells = ordered_json::array();
  for (const ConvergenceCell& c : report.cells) {
    cells.push_back({{"n", c.n},
                     {"k", c.k},
                     {"samples", c.samples},
                     {"lambda_target", c.lambda_target},
                     {"sigma2", c.sigma2},
                     {"target", c.target.to_string()},
                     {"degenerate", c.degenerate},
                     {"ks", c.ks},
                     {"envelope", c.envelope},
                     {"stream_id", c.stream_id}});
  }
  j["cells"] = cells;
  j["degenerate"] = report.any_degenerate();
  j["fitted_envelope_constant"] = real_json(report.fitted_envelope_constant());
  return dump(j);
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out = join(csv_columns("convergence"));
  const CltStudySpec& s = report.spec;
  for (const ConvergenceCell& c : report.cells) {
    out += join({std::to_string(c.n), std::to_string(c.k), s.p.to_string(), s.w.to_string(), to_string(s.variant),
                 c.target.to_string(), format_real(c.ks), format_real(c.envelope)});
  }
  return out;
}

std::string convergence_plot_ks_csv(const ConvergenceReport& report) {
  std::string out = join(csv_columns("plot-ks"));
  for (const ConvergenceCell& c : report.cells) {
    out += join({std::to_string(c.n), format_real(c.ks)});
  }
  return out;
}

std::string convergence_plot_envelope_csv(const ConvergenceReport& report) {
  std::string out = join(csv_columns("plot-envelope"));
  for (const ConvergenceCell& c : report.cells) {
    out += join({std::to_string(c.n), format_real(c.envelope)});
  }
  return out;
}

std::string convergence_timing_csv(const ConvergenceReport& report) {
  std::string out = join(csv_columns("timing"));
  for (const ConvergenceCell& c : report.cells) {
    out += join({std::to_string(c.n), std::to_string(c.k), format_real(c.seconds)});
  }
  return out;
}

std::string rate_grid_csv(const RateGrid& grid) {
  std::string out = join(rate_grid_columns(grid));
  const std::size_t inner = grid.axes.size() > 1 ? grid.axes[1].size() : 1;
  for (std::size_t c = 0; c < grid.values.size(); ++c) {
    std::vector<std::string> row;
    row.push_back(format_real(grid.axes[0][c / inner]));
    if (grid.axes.size() > 1) {
      row.push_back(format_real(grid.axes[1][c % inner]));
    }
    row.push_back(grid.values[c].to_string());
    if (!grid.lower.empty()) {
      row.push_back(format_real(grid.lower[c]));
      row.push_back(format_real(grid.upper[c]));
    }
    row.push_back(grid.flags.empty() ? std::string() : grid.flags[c]);
    out += join(row);
  }
  return out;
}

std::string rate_grids_json(const std::vector<RateGrid>& grids) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "rate-grids";
  ordered_json list = ordered_json::array();
  for (const RateGrid& g : grids) {
    ordered_json e;
    e["label"] = g.label;
    e["axis_names"] = g.axis_names;
    ordered_json axes = ordered_json::array();
    for (const auto& a : g.axes) {
      axes.push_back(a);
    }
    e["axes"] = axes;
    ordered_json vals = ordered_json::array();
    for (const ExtReal& v : g.values) {
      vals.push_back(ext_json(v));
    }
    e["values"] = vals;
    e["flags"] = g.flags;
    if (!g.lower.empty()) {
      ordered_json lo = ordered_json::array(), hi = ordered_json::array();
      for (std::size_t i = 0; i < g.lower.size(); ++i) {
        lo.push_back(real_json(g.lower[i]));
        hi.push_back(real_json(g.upper[i]));
      }
      e["lower"] = lo;
      e["upper"] = hi;
    }
    std::vector<bool> cert = g.convexity_certificate;
    e["convexity_certificate"] = cert;
    list.push_back(e);
  }
  j["grids"] = list;
  return dump(j);
}

std::vector<std::string> csv_header(std::string_view csv) {
  const std::size_t end = csv.find('\n');
  const std::string_view line = csv.substr(0, end);
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cols.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return cols;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw PreconditionError("cannot open " + path.string() + " for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw PreconditionError("write failed for " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw PreconditionError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace lpproj::report
