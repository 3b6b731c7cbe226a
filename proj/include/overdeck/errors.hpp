#pragma once

#include <stdexcept>
#include <string>

namespace overdeck {

/// Raised when a configuration or an input value violates a contract.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a run fails mid-flight (stale plan, incomplete measurement, ...).
class RuntimeFault : public std::runtime_error {
 public:
  explicit RuntimeFault(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace overdeck
