#pragma once

#include <stdexcept>
#include <string>

namespace facpoly {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. The message names the offending
/// term, block, edge or field.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An assignment or tensor whose shape does not match the instance.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A computation refused because its predicted size exceeds a configured
/// limit.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A file that cannot be read or written, or text that is not JSON.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace facpoly
