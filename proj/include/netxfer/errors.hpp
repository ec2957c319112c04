#pragma once

#include <stdexcept>
#include <string>

namespace netxfer {

// Malformed or inconsistent configuration (scenario, template, model config, CLI arguments).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing, empty or unreadable data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values in a computation. The message names the offending op.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netxfer
