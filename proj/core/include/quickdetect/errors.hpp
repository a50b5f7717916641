#pragma once

#include <stdexcept>
#include <string>

namespace quickdetect {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-domain argument to a formula or constructor.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Dynamics whose spectral radius is not below one.
class InstabilityError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// History buffer does not hold enough past observations.
class StateError : public Error {
 public:
  using Error::Error;
};

// A Monte Carlo estimator had no usable replications.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace quickdetect
