#pragma once

#include <stdexcept>
#include <string>

namespace driftlab {

/// Base class for every error raised by the library.
///
/// Errors fall into two families that map onto the CLI exit codes:
/// input errors (bad configuration, malformed files, degenerate ground
/// truth) exit with 2, numeric failures (non-finite solver state,
/// diverging training) exit with 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

class InputError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Input-side errors.
class UnsupportedOrderError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateGroundTruthError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

// Numeric-side errors.
class NumericFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

class GenerationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TrainingFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace driftlab
