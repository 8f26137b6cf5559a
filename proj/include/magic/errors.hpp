#pragma once

#include <stdexcept>
#include <string>

namespace magic {

/// An input violated a documented invariant (Hermiticity, trace, primality...).
class InvariantViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input document.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numerical routine did not reach its accuracy target.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace magic
