#pragma once

#include <stdexcept>
#include <string>

namespace riscf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Array shapes that do not agree with each other or with the scenario.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Coincident nodes or otherwise unusable geometry.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Zero or rank-deficient channels where a construction needs full rank.
class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside an iterative solver.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unreadable scenario/sweep description.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant that the algebra guarantees was observed broken.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace riscf
