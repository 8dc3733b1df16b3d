#pragma once

#include <stdexcept>
#include <string>

namespace sigsched {

// Base for all library errors. The CLI maps subclasses onto exit codes:
// ConfigError -> 2, data errors -> 3, numerical errors -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (bad flags, malformed config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; message carries row/column context.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long row, const std::string& column)
      : Error(what + " (row " + std::to_string(row) + ", column " + column + ")"),
        row_(row),
        column_(column) {}
  long row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  long row_;
  std::string column_;
};

// Input parsed but violates a dataset invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Fewer observations/participants than an operation requires.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// An aggregate was asked for on an empty collection.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// A factorization or solve failed; signals an invariant violation upstream.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Posterior noise-variance mean does not exist (shape <= 1).
class DegenerateNoise : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace sigsched
