#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lpproj {

struct CheckResult {
  std::string suite;  // module name
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite of every module at reduced sample sizes (tens of seconds).
std::vector<CheckResult> run_validation(std::size_t workers = 1);

/// Fixed-width pass/fail table.
std::string validation_table(const std::vector<CheckResult>& results);

}  // namespace lpproj
