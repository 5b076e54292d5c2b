#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace owc {

enum class ErrorKind {
  EmptyInput,
  InsufficientPoints,
  DegenerateCloud,
  Shape,
  ZeroVector,
  Parse,
  Format,
  Validation,
  Build,
  Merge,
  Alignment,
  Config,
  Backend,
  Io,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI)
// can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse errors remember the 1-based line (text formats) or byte offset (binary).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(ErrorKind::Parse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace owc
