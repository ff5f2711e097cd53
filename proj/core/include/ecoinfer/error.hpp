#pragma once

#include <stdexcept>
#include <string>

namespace ecoinfer {

// Invalid user-supplied configuration (bad parameter, unknown profile).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (parse failures, trace gaps).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request that can never be scheduled under the cluster limits.
class CapacityError : public DataError {
 public:
  using DataError::DataError;
};

// An environment trace does not span the requested window.
class CoverageError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace ecoinfer
