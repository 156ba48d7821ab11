#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carpetdim {

enum class ErrorKind {
  NotContractive,
  OrderViolation,
  TranslationOutOfBox,
  RectangleOverlap,
  ParameterOutOfRange,
  IndexOutOfRange,
  FieldMismatch,
  DivisionByZero,
  PrecisionUnreachable,
  BudgetExceeded,
  ZeroBins,
  NonpositiveQ,
  DegenerateFit,
  InsufficientTail,
  InsufficientScales,
  PreconditionViolation,
  ConflictingEvidence,
  MissingS,
  ConfigParse,
  InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace carpetdim
