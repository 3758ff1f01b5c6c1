#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace magblock {

/// Compact rendering of a double for error messages.
inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NonUniqueSteadyState : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class StiffnessError : public Error {
 public:
  using Error::Error;
};

class IntegratorError : public Error {
 public:
  using Error::Error;
};

/// Raised when the steady state is too close to the magnon vacuum for g2 to
/// be meaningful.
class NoExcitation : public Error {
 public:
  using Error::Error;
};

class PositivityError : public Error {
 public:
  using Error::Error;
};

/// The Fock cutoff ladder was exhausted before g2 converged.
class TruncationError : public Error {
 public:
  using Error::Error;
};

}  // namespace magblock
