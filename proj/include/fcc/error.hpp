#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands drawn from two different semiring instances (or systems).
class InstanceMismatch : public Error {
 public:
  using Error::Error;
};

/// Pointwise comparison of constraints with different scopes.
class ScopeMismatch : public Error {
 public:
  using Error::Error;
};

/// A precondition of a public operation was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed program text. Carries a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// An engine invariant did not hold; indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcc
