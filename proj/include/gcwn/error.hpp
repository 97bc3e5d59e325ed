#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcwn {

enum class ErrorCode {
  OverlappingLocations,
  EdgeOutOfRange,
  LocationNotPresent,
  OpenExpression,
  ArityError,
  TypeError,
  Overflow,
  MalformedMessage,
  UnknownPrimitive,
  UnknownConstant,
  UnguardedRecursion,
  BudgetExceeded,
  DomainError,
  CapExceeded,
  NotAdapted,
  SyntaxError,
  UnknownNetwork,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// All engine failures are reported as `gcwn::Error`; the code identifies
/// the violated contract and the message carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Errors originating from expression evaluation (open terms, type errors,
/// overflow, malformed protocol messages).
class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcwn
