#pragma once

#include <stdexcept>
#include <string>

namespace sgi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Geometry problems: grids too small, points outside the valid field region.
struct GeometryError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct SingularityError : Error {
  using Error::Error;
};

// Anything that invalidates a run numerically (norm drift, wraparound, broken
// monotonicity during a search).  Maps to exit code 3 in the CLI.
struct NumericalFailure : Error {
  using Error::Error;
};

struct SearchFailure : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};

struct DegenerateStateError : Error {
  using Error::Error;
};

struct IntegrityError : Error {
  using Error::Error;
};

struct GridMismatchError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace sgi
