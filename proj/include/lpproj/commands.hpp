#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "lpproj/config.hpp"

namespace lpproj {

/// git describe of the build, or "unknown".
std::string version_string();

struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> outputs;  // report files, manifest last
  bool degenerate = false;                     // clt-study / berry-esseen
};

/// Runs a resolved config: writes the report files and manifest.json into
/// config.out_dir and a human summary to `out`. Throws ModuleError or
/// ConfigError on failure.
CommandOutcome execute(const StudyConfig& config, std::ostream& out);

/// execute() with error handling: failures print one JSON object
/// {"status":"error",...} to `err`, are also written to <out_dir>/error.json
/// when possible, and give a nonzero exit code (2 config, 3 module error,
/// 1 validation failures).
int run_command(const StudyConfig& config, std::ostream& out, std::ostream& err);

/// Machine-readable error text for an exception.
std::string error_json(const std::exception& e);

}  // namespace lpproj
