#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tddsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed circuit text. Line and column are 1-based; column is 0 when
/// the format is line-oriented and no finer position is meaningful.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    std::string out = "line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

class UnsupportedGateError : public ParseError {
 public:
  UnsupportedGateError(const std::string& gate, std::size_t line, std::size_t column)
      : ParseError("unsupported gate '" + gate + "'", line, column), gate_(gate) {}

  const std::string& gate() const noexcept { return gate_; }

 private:
  std::string gate_;
};

class QubitRangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

/// A dense computation would exceed the configured size guard.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// The node arena hit its hard capacity.
class ArenaExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace tddsim
