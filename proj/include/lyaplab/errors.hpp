#pragma once

#include <stdexcept>
#include <string>

namespace lyaplab {

// Base of everything the library throws. The C API maps each subclass to a
// status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (non-finite angle, window too
// short, delta = 0 where delta > 0 is required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed model or run description.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A computation that could not produce a trustworthy number: singular
// restriction, resolvent clamp violation, quadrature failure.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace lyaplab
