#pragma once

#include <stdexcept>
#include <string>

namespace revlin {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters outside the admissible range of a spec, family or operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A certified truncation window could not be found below the hard cap.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A dependence condition needed by an operation fails (non-summable
/// covariances, non-ergodic walk, spectral atom at t = 1).
class ConditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or schema-violating configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace revlin
