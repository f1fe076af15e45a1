#pragma once

#include <stdexcept>
#include <string>

namespace logdecay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request needs information below a known cutoff or beyond the p-adic precision.
class PrecisionExhausted : public Error {
 public:
  explicit PrecisionExhausted(const std::string& what) : Error("precision exhausted: " + what) {}
};

/// An exponent denominator exceeds the configured p-power budget.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what) : Error("budget exceeded: " + what) {}
};

/// Operands live over different residue fields or different primes.
class FieldMismatch : public Error {
 public:
  explicit FieldMismatch(const std::string& what) : Error("field mismatch: " + what) {}
};

/// Division by an element that is zero or not a unit at the available precision.
class NotInvertible : public Error {
 public:
  explicit NotInvertible(const std::string& what) : Error("not invertible: " + what) {}
};

/// A Frobenius matrix that is not invertible over the integral ring at precision.
class NotUnitRoot : public Error {
 public:
  explicit NotUnitRoot(const std::string& what) : Error("not unit-root: " + what) {}
};

/// Malformed input or violated precondition.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

/// A checked inequality failed. Signals a library bug rather than bad input.
class VerdictFailure : public Error {
 public:
  explicit VerdictFailure(const std::string& what) : Error("verdict failure: " + what) {}
};

}  // namespace logdecay
