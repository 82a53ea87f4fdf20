#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pol {

// Error categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Syntax,
  UnknownSymbol,
  UnknownAgent,
  UnknownState,
  Format,
  BudgetInvalid,
  ResourceExceeded,
  ClosureTooLarge,
  NotABts,
  InconsistentTriple,
  SpaceBoundTooLarge,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(ErrorKind::Syntax, std::to_string(line) + ":" +
                                     std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Thrown when a configurable state/node/label budget is hit. Callers turn
// this into an UNKNOWN verdict; it never stands for a semantic answer.
class ResourceExceeded : public Error {
 public:
  explicit ResourceExceeded(const std::string& what)
      : Error(ErrorKind::ResourceExceeded, what) {}
};

}  // namespace pol
