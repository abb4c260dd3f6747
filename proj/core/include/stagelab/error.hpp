#pragma once

#include <stdexcept>
#include <string>

namespace stagelab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of states, datasets or vectors disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A configuration, dataset or argument violates its contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, divergence, monotonicity violations, singular systems.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace stagelab
