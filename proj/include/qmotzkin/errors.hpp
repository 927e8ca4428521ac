#pragma once

#include <stdexcept>
#include <string>

namespace qmotzkin {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (also poles).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Base for numeric guards: the inputs were valid but the requested
// accuracy / size could not be delivered.
class NumericGuard : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericGuard {
 public:
  using NumericGuard::NumericGuard;
};

// Truncation height / state cap / enumeration size guard violated.
class CapacityError : public NumericGuard {
 public:
  using NumericGuard::NumericGuard;
};

class OverflowError : public NumericGuard {
 public:
  using NumericGuard::NumericGuard;
};

class AccuracyLoss : public NumericGuard {
 public:
  using NumericGuard::NumericGuard;
};

// Boundary weights not summable (normalising constant infinite).
class DivergenceError : public NumericGuard {
 public:
  using NumericGuard::NumericGuard;
};

}  // namespace qmotzkin
