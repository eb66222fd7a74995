#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zar {

enum class ErrorKind {
  kTypeError,
  kDivisionByZero,
  kChoiceOutOfRange,
  kUniformNonPositive,
  kBoundError,
  kZeroDenominator,
  kSyntaxError,
  kArityError,
  kExhausted,
  kBiasOutOfRange,
  kNonPositive,
  kNotNormalized,
  kAllMassFails,
  kStepBudgetExceeded,
  kNegativeExpectation,
  kInternal,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(ErrorKind kind, int line, int column, const std::string& message)
      : Error(kind, std::to_string(line) + ":" + std::to_string(column) + ": " +
                        message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace zar
