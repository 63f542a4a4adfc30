#pragma once

#include <stdexcept>
#include <string>

namespace lamina {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A Moebius matrix with (numerically) vanishing determinant.
class DegenerateMapError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine (quadrature, root solve, fit) failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Deck-transformation reduction did not reach the fundamental domain.
class ReductionFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No candidate holonomy map survived the IFS checks.
class EmptySystemError : public Error {
 public:
  using Error::Error;
};

/// An operation was called without the estimates it depends on.
class DependencyError : public Error {
 public:
  using Error::Error;
};

/// The requested very-ample witness does not exist in the numerical lattice.
class NoWitnessError : public Error {
 public:
  using Error::Error;
};

}  // namespace lamina
