#pragma once

#include <stdexcept>
#include <string>

namespace sudo {

// Invalid run configuration (bad flags, bad config values, inconsistent
// thresholds). The CLI maps this to its own exit code.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Input data violates a contract: malformed rows, out-of-range values,
// missing classes, too few records to sample from.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sudo
