#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "lpproj/commands.hpp"
#include "lpproj/config.hpp"
#include "lpproj/errors.hpp"
#include "lpproj/report_io.hpp"

using namespace lpproj;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lpproj_unit_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

StudyConfig cfg(std::vector<std::pair<std::string, std::string>> pairs) { return resolve(config_from_pairs(pairs)); }

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("defaults from minimal flags") {
  const StudyConfig c = cfg({{"command", "clt-study"}, {"p", "2"}, {"n", "1024"}});
  CHECK(c.lambda == 0.5);
  CHECK(c.samples == std::vector<std::size_t>{100000});
  CHECK(c.seed == 0);
  CHECK(c.variant == VarianceVariant::MomentBased);
  CHECK(c.conv == ScaleConvention::UnitDensity);
  CHECK(c.k_rule->kind == KRule::Kind::Lambda);
  CHECK(c.n_grid == std::vector<long>{1024});
  CHECK(c.out_dir.filename() == "clt-study");

  const StudyConfig b = cfg({{"command", "berry-esseen"}, {"p", "1"}});
  CHECK(b.n_grid == std::vector<long>{1000, 10000, 100000});
  CHECK(b.k_rule->k_for(1024, 0.5) == 256);
}

TEST_CASE("output directory from the environment") {
  ::setenv(kOutDirEnv, "/tmp/lpproj_env_out", 1);
  const StudyConfig c = cfg({{"command", "sample"}});
  ::unsetenv(kOutDirEnv);
  CHECK(c.out_dir == fs::path("/tmp/lpproj_env_out/sample"));
}

TEST_CASE("unknown keys are rejected with a suggestion") {
  try {
    (void)config_from_pairs({{"command", "clt-study"}, {"lamda", "0.3"}});
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lamda") != std::string::npos);
    CHECK(msg.find("\"lambda\"") != std::string::npos);
  }
  CHECK(suggest_key("sampels") == std::optional<std::string>("samples"));
  CHECK_FALSE(suggest_key("completely_unrelated").has_value());
  CHECK_THROWS_AS(config_from_pairs({{"p", "2"}, {"p", "3"}}), ConfigError);
}

TEST_CASE("invariants of the config") {
  CHECK_THROWS_AS(cfg({{"command", "clt-study"}, {"n", "1024,256"}}), ConfigError);
  CHECK_THROWS_AS(cfg({{"command", "clt-study"}, {"n", "256,256"}}), ConfigError);
  CHECK_THROWS_AS(cfg({{"command", "clt-study"}, {"samples", "999"}}), ConfigError);
  CHECK_THROWS_AS(cfg({{"command", "clt-study"}, {"lambda", "1.5"}}), ConfigError);
  CHECK_THROWS_AS(cfg({{"command", "clt-study"}, {"p", "0.5"}}), ConfigError);
  CHECK_THROWS_AS(cfg({{"command", "frobnicate"}}), ConfigError);
  CHECK_NOTHROW(cfg({{"command", "ldp-rates"}, {"p", "3"}, {"samples", "10"}}));
  try {
    (void)cfg({{"command", "clt-study"}, {"n", "1024,256"}});
  } catch (const ConfigError& e) {
    CHECK(e.field() == "n");
  }
}

TEST_CASE("JSON config files") {
  const StudyConfig c = config_from_json_text(R"({"command": "tail-rates", "p": 1, "lambda": 1,
      "n": [64, 128], "samples": [2000, 4000], "w": "gamma:2"})");
  CHECK(c.command == Command::TailRates);
  CHECK(c.n_grid == std::vector<long>{64, 128});
  CHECK(c.samples_for(1) == 4000);
  CHECK(c.w == WSpec::gamma(2));
  try {
    (void)config_from_json_text("{\n  \"p\": 2,\n  \"n\": [1, 2,\n}");
    FAIL("parsed invalid JSON");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_json_text(R"({"lamda": 0.2})"), ConfigError);
}

TEST_CASE("config JSON round trip and hash") {
  const StudyConfig c = cfg({{"command", "clt-study"}, {"p", "inf"}, {"w", "exponential1"}, {"seed", "9"},
                             {"k_rule", "n^0.9"}, {"n", "64,128"}});
  const StudyConfig back = resolve(config_from_json_text(config_json(c)));
  CHECK(config_json(back) == config_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  StudyConfig other = c;
  other.workers = 3;
  other.out_dir = "/elsewhere";
  CHECK(config_hash(other) == config_hash(c));
  other.seed = 10;
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("CSV schemas are fixed") {
  CHECK(report::csv_columns("convergence") ==
        std::vector<std::string>{"n", "k", "p", "w", "variant", "target", "ks", "envelope"});
  CHECK(report::csv_columns("plot-ks") == std::vector<std::string>{"n", "ks"});
  CHECK(report::csv_columns("stat-batch") == std::vector<std::string>{"value"});
  CHECK(report::ball_batch_columns(3) == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(report::csv_header("a,b\n1,2\n") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("clt-study writes reproducible reports") {
  const fs::path dir = scratch_dir("clt");
  auto run = [&](const std::string& sub) {
    const StudyConfig c = cfg({{"command", "clt-study"}, {"p", "1.5"}, {"n", "32,64"}, {"samples", "2000"},
                               {"seed", "5"}, {"out_dir", (dir / sub).string()}});
    std::ostringstream out, err;
    CHECK(run_command(c, out, err) == 0);
    return c;
  };
  run("a");
  run("b");
  for (const char* f : {"report.json", "report.csv", "plot_ks.csv", "plot_envelope.csv"}) {
    CHECK(report::read_file(dir / "a" / f) == report::read_file(dir / "b" / f));
  }
  const std::string csv = report::read_file(dir / "a" / "report.csv");
  CHECK(report::csv_header(csv) == report::csv_columns("convergence"));
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(report::csv_header(report::read_file(dir / "a" / "timing.csv")) == report::csv_columns("timing"));

  const auto m = nlohmann::json::parse(report::read_file(dir / "a" / "manifest.json"));
  CHECK(m["schema_version"] == report::kSchemaVersion);
  CHECK(m["seed"] == 5);
  CHECK(m["version"] == version_string());
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m.contains("wall_time_seconds"));
  CHECK(nlohmann::json::parse(report::read_file(dir / "a" / "report.json"))["schema_version"] == report::kSchemaVersion);

  // re-run from the manifest into a third directory
  StudyConfig again = load_manifest_config(dir / "a" / "manifest.json");
  again.out_dir = dir / "c";
  std::ostringstream out, err;
  CHECK(run_command(again, out, err) == 0);
  for (const char* f : {"report.json", "report.csv", "plot_ks.csv", "plot_envelope.csv"}) {
    CHECK(report::read_file(dir / "a" / f) == report::read_file(dir / "c" / f));
  }
  fs::remove_all(dir);
}

TEST_CASE("degenerate study is flagged in the manifest") {
  const fs::path dir = scratch_dir("degenerate");
  const StudyConfig c = cfg({{"command", "clt-study"}, {"p", "2"}, {"w", "dirac0"}, {"k_rule", "n"},
                             {"n", "16,32"}, {"samples", "1000"}, {"out_dir", dir.string()}});
  std::ostringstream out, err;
  CHECK(run_command(c, out, err) == 0);
  const auto m = nlohmann::json::parse(report::read_file(dir / "manifest.json"));
  CHECK(m["degenerate"] == true);
  fs::remove_all(dir);
}

TEST_CASE("other commands write their files") {
  const fs::path dir = scratch_dir("cmds");
  std::ostringstream out, err;
  CHECK(run_command(cfg({{"command", "sample"}, {"sample_kind", "ball"}, {"p", "3"}, {"n", "4"},
                         {"samples", "1000"}, {"out_dir", (dir / "s").string()}}),
                    out, err) == 0);
  CHECK(report::csv_header(report::read_file(dir / "s" / "samples.csv")) == report::ball_batch_columns(4));
  CHECK(run_command(cfg({{"command", "ldp-rates"}, {"p", "1.5"}, {"out_dir", (dir / "l").string()}}), out, err) == 0);
  CHECK(fs::exists(dir / "l" / "rate_i2.csv"));
  CHECK(fs::exists(dir / "l" / "rates.json"));
  CHECK(run_command(cfg({{"command", "tail-rates"}, {"p", "1"}, {"lambda", "1"}, {"n", "16,32"}, {"samples", "2000"},
                         {"out_dir", (dir / "t").string()}}),
                    out, err) == 0);
  CHECK(report::csv_header(report::read_file(dir / "t" / "tail_rates.csv")) ==
        std::vector<std::string>{"n", "value", "lower", "upper", "flag"});
  fs::remove_all(dir);
}

TEST_CASE("errors are machine readable") {
  const fs::path dir = scratch_dir("err");
  // ldp-rates needs a finite p; the failure is reported as JSON with the module
  StudyConfig c = cfg({{"command", "ldp-rates"}, {"p", "3"}, {"out_dir", dir.string()}});
  c.p = PExponent::infinity();
  std::ostringstream out, err;
  const int code = run_command(c, out, err);
  CHECK(code != 0);
  const auto j = nlohmann::json::parse(err.str());
  CHECK(j["status"] == "error");
  CHECK(j.contains("module"));
  CHECK(j.contains("message"));

  const auto e = nlohmann::json::parse(error_json(ModuleError("fluctuation_lab", "n=64", "argument", "boom")));
  CHECK(e["module"] == "fluctuation_lab");
  CHECK(e["cell"] == "n=64");
  fs::remove_all(dir);
}

}  // TEST_SUITE
