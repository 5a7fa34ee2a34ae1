#pragma once

#include <stdexcept>
#include <string>

namespace paratorus {

/// Bad argument to an operation (out-of-range block index, negative time, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration (grid too small, cutoff beyond Nyquist, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructed object violates a structural condition (symbol support, decay).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown during time stepping (ellipticity lost, blow-up).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace paratorus
