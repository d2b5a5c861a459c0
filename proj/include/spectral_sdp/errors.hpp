#pragma once

#include <stdexcept>
#include <string>

namespace spectral_sdp {

/// Caller supplied data that violates a precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (NaN iterates, eigensolver breakdown, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares system too ill-conditioned to trust.
class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The dual polynomial has unit modulus on a large part of the circle, so
/// no finite support can be read from it.
class DegeneratePolynomial : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An internal consistency check failed; indicates a bug, not bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Exact integer arithmetic would overflow 64 bits.
class CapacityError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// An exhaustive search ran out of its evaluation budget before it could
/// decide.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spectral_sdp
