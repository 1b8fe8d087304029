#pragma once

#include <stdexcept>
#include <string>

namespace ginprod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or profile shapes that cannot be used together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A realization hit a probability-zero degeneracy (rank collapse, zero product).
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// Numerical result could not be certified at the requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds what an algorithm supports (matrix too large, order too high).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for an estimator.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Working precision was too low to resolve the spectrum; retry with more bits.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, long bits_used)
      : Error(what + " (precision " + std::to_string(bits_used) +
              " bits insufficient, retry with more bits)"),
        bits_used_(bits_used) {}

  long bits_used() const noexcept { return bits_used_; }

 private:
  long bits_used_;
};

}  // namespace ginprod
