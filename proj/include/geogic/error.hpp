#pragma once

#include <stdexcept>
#include <string>

namespace geogic {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid inputs: bad parameters, malformed files, violated preconditions.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Factorization, optimization or design-rank failures.
class NumericalError : public Error {
public:
  using Error::Error;
};

class SingularityError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularDesignError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class OptimizationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace geogic
