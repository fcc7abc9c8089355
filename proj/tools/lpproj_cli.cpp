#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpproj/commands.hpp"
#include "lpproj/config.hpp"
#include "lpproj/errors.hpp"
#include "lpproj/report_io.hpp"

namespace {

const std::vector<std::pair<std::string, std::string>> kOptionHelp{
    {"p", "exponent p >= 1 or 'inf' (default 2)"},
    {"w", "mixing law: dirac0, exponential1, gamma:<shape> (default exponential1)"},
    {"lambda", "limit ratio k/n (default 0.5)"},
    {"k_rule", "lambda | n | n^<gamma> | const:<k> (default lambda; n^0.8 for berry-esseen)"},
    {"lambda_mode", "limit | cell: lambda used in the Gaussian target"},
    {"n", "comma-separated, strictly increasing n-grid"},
    {"samples", "Monte Carlo sample count, one or one per n (default 100000)"},
    {"seed", "root seed (default 0)"},
    {"workers", "worker threads (default 1)"},
    {"substreams", "RNG substreams per batch (default 4)"},
    {"variant", "moment-based | printed-closed-form"},
    {"m_variant", "as-printed | moment-consistent"},
    {"convention", "unit (canonical) | paper"},
    {"method", "representation | direct-haar"},
    {"sample_kind", "ball | raw-norm | centered-x (sample only)"},
    {"y", "tail threshold (tail-rates)"},
    {"y_grid", "comma-separated evaluation points (ldp-rates)"},
    {"out_dir", "output directory (default $LPPROJ_OUT_DIR/<command> or ./lpproj_out/<command>)"},
};

// Leftover "--key value" / "--key=value" arguments, handed to the strict config
// layer so that misspelt keys get a suggestion.
std::vector<std::pair<std::string, std::string>> extra_pairs(const std::vector<std::string>& rest) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    std::string arg = rest[i];
    if (arg.rfind("--", 0) != 0) {
      throw lpproj::ConfigError("", "unexpected argument '" + arg + "'");
    }
    arg = arg.substr(2);
    const std::size_t eq = arg.find('=');
    if (eq != std::string::npos) {
      pairs.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
    } else if (i + 1 < rest.size()) {
      pairs.emplace_back(arg, rest[++i]);
    } else {
      throw lpproj::ConfigError(arg, "missing value");
    }
  }
  return pairs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projections of l_p-ball measures: sampling, CLT and large-deviation studies"};
  app.set_version_flag("--version", lpproj::version_string());
  std::string manifest;
  std::string manifest_out;
  app.add_option("--from-manifest", manifest, "re-run the config embedded in a manifest.json");
  app.add_option("--manifest-out-dir", manifest_out, "output directory for --from-manifest");
  app.require_subcommand(0, 1);

  struct Sub {
    CLI::App* app;
    std::string config_file;
    std::map<std::string, std::string> values;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"sample", "draw ball points or projection statistics"},
      {"clt-study", "Kolmogorov distance of the centered statistic to its limit along an n-grid"},
      {"berry-esseen", "clt-study along k = n^0.8 with the fitted envelope constant"},
      {"ldp-rates", "tabulate the cumulant and the rate functions"},
      {"tail-rates", "Monte Carlo tail-rate estimates with Wilson intervals"},
      {"validate", "run every module's invariant suite"},
  };
  for (const auto& [name, help] : commands) {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(name, help);
    sub->app->allow_extras();
    sub->app->add_option("--config", sub->config_file, "JSON config file (flags override its keys)");
    for (const auto& [key, text] : kOptionHelp) {
      sub->app->add_option("--" + key, sub->values[key], text);
    }
    subs.push_back(std::move(sub));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  lpproj::StudyConfig config;
  try {
    if (!manifest.empty()) {
      config = lpproj::load_manifest_config(manifest);
      if (!manifest_out.empty()) {
        config.out_dir = manifest_out;
      }
      config = lpproj::resolve(config);
    } else {
      const Sub* chosen = nullptr;
      for (const auto& s : subs) {
        if (s->app->parsed()) {
          chosen = s.get();
        }
      }
      if (chosen == nullptr) {
        std::cout << app.help();
        return 0;
      }
      std::vector<std::pair<std::string, std::string>> pairs;
      std::map<std::string, std::string> from_flags;
      for (const auto& [key, value] : chosen->values) {
        if (chosen->app->count("--" + key) > 0) {
          from_flags[key] = value;
        }
      }
      for (const auto& [key, value] : extra_pairs(chosen->app->remaining())) {
        from_flags[key] = value;
      }
      if (!chosen->config_file.empty()) {
        for (const auto& [key, value] : lpproj::json_config_pairs(lpproj::report::read_file(chosen->config_file))) {
          if (key != "command" && from_flags.count(key) == 0) {
            pairs.emplace_back(key, value);
          }
        }
      }
      pairs.emplace_back("command", chosen->app->get_name());
      for (const auto& kv : from_flags) {
        pairs.push_back(kv);
      }
      config = lpproj::resolve(lpproj::config_from_pairs(pairs));
    }
  } catch (const std::exception& e) {
    std::cerr << lpproj::error_json(e) << "\n";
    return 2;
  }
  return lpproj::run_command(config, std::cout, std::cerr);
}
