#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nullbound {

enum class ErrorCode {
  Syntax,
  UnknownIdentifier,
  VariableOutOfRange,
  InvalidDocument,
  Domain,
  OutsideDomain,
  DegenerateMetric,
  MissingWeight,
  RiemannianSignature,
  NotInFlowImage,
  NotNull,
  ParameterOutOfRange,
  InvalidArgument,
  UnknownEntry,
  InsufficientData,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `code()` lets callers branch on the
/// failure class (the CLI maps it onto exit codes).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure carrying a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, int line, int column)
      : Error(code, "line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace nullbound
