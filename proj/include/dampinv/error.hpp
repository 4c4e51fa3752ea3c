#pragma once

#include <stdexcept>
#include <string>

namespace dampinv {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid or sample count too coarse for the requested mode / order.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Time step violates the explicit scheme's stability bound.
class CflError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf produced during a computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to reach tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A probe produced a (numerically) zero boundary trace.
class ObservabilityError : public Error {
 public:
  using Error::Error;
};

/// Truncation rule evaluated outside its small-gap regime.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Invalid domain input (bad sizes, out-of-range parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace dampinv
