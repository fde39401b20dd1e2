#pragma once

#include <stdexcept>
#include <string>

namespace hawking {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point outside the coordinate chart, or a model that violates its own invariants.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (configuration or shape files).
class ParseError : public Error {
 public:
  using Error::Error;
};

class SingularMetricError : public Error {
 public:
  using Error::Error;
};

/// Radial function not positive, degenerate tangents, or a surface leaving the chart.
class ImmersionError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegreeError : public Error {
 public:
  using Error::Error;
};

class DegenerateProbeError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference step rejected (cancellation or truncation dominated).
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Line search gave up.
class StallError : public Error {
 public:
  using Error::Error;
};

}  // namespace hawking
