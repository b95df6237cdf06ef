#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace econqe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (DSL, SMT-LIB, models, config). Positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A quantified variable occurs with degree above the virtual-substitution bound.
class DegreeExceeded : public Error {
 public:
  using Error::Error;
};

/// DNF expansion would exceed the configured clause cap.
class ClauseCapExceeded : public Error {
 public:
  using Error::Error;
};

class DeadlineExceeded : public Error {
 public:
  DeadlineExceeded() : Error("deadline exceeded") {}
};

}  // namespace econqe
