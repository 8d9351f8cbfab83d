#pragma once

#include <stdexcept>
#include <string>

namespace copeland {

// Violated precondition on an argument (bad k, probability outside range, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (files, matrices, comparison rows).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The comparison graph has more than one connected component.
class DisconnectedGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver hit its iteration cap before reaching tolerance.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A likelihood evaluated to a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration was requested over an instance that is too large.
class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace copeland
