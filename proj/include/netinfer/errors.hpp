#pragma once

#include <stdexcept>

namespace netinfer {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: bad arguments, malformed files, bad configs.
// The CLI maps these to exit code 2.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class FormatError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class LengthError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Numerical failures and violated model assumptions.
// The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConditioningError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConstructionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class AssumptionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateInputError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace netinfer
