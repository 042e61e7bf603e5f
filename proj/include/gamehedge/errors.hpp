#pragma once

#include <stdexcept>

namespace gamehedge {

/// Malformed or out-of-range run configuration. Messages name the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem instance too large for the requested mode (path trees, oracle).
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical invariant failed after a solve or simulation.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gamehedge
