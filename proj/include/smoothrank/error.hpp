#pragma once

#include <stdexcept>
#include <string>

namespace smoothrank {

/// Failure caused by the caller's input (bad file, bad column, degenerate data).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside a numeric routine that valid input should not trigger.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smoothrank
