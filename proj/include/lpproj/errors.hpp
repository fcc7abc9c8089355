#pragma once

#include <stdexcept>
#include <string>

namespace lpproj {

/// Invalid argument to a library operation (bad count, out-of-range parameter).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an algorithm does not hold for the input.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent study configuration.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Failure inside one module while running a command, tagged with the module
/// and the grid cell (if any) being processed.
class ModuleError : public std::runtime_error {
 public:
  ModuleError(std::string module, std::string cell, std::string kind, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)), cell_(std::move(cell)), kind_(std::move(kind)) {}
  const std::string& module() const { return module_; }
  const std::string& cell() const { return cell_; }
  /// "argument", "precondition", "config" or "runtime".
  const std::string& kind() const { return kind_; }

 private:
  std::string module_;
  std::string cell_;
  std::string kind_;
};

}  // namespace lpproj
