#pragma once

#include <stdexcept>
#include <string>

namespace mdepth {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shapes, out-of-range options, unparseable files.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Fewer sample objects than the depth function needs.
class InsufficientSample : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Failures that come from the numbers themselves rather than their shape.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Distances that cannot have come from a metric (e.g. a negative Oja radicand).
class MetricViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

class NotPositiveDefinite : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A coordinate vector that does not map back to a valid object.
class DegenerateDecode : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace mdepth
