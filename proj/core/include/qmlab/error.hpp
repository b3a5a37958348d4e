#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmlab {

enum class ErrorCode {
  Precondition,
  CoverViolation,
  AssignmentDepthExceeded,
  DyadicPoint,
  InfConflict,
  InfiniteTotal,
  NegativeValue,
  SearchBudgetExceeded,
  VariationUnstable,
  ParseError,
  UnknownFunction,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace qmlab
