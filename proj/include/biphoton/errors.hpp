#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on input values was violated.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A grid carried the wrong domain tag for the requested operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input is degenerate (e.g. an all-zero grid cannot be normalized).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A value exceeded its allowed range (e.g. the pre-compensator delay).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The configured grid cannot resolve the requested structure.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A curve has no measurable width (no half-max crossings).
class NotMeasurableError : public Error {
 public:
  using Error::Error;
};

/// An iterative fit failed to converge; the message carries diagnostics.
class FitFailureError : public Error {
 public:
  using Error::Error;
};

/// A matrix that should be a density matrix is not one within tolerance.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Configuration file problems (unknown keys, bad values, missing sections).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem/output problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace biphoton
