#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opaug {

enum class ErrorCode {
  NotPositiveDefinite,
  DimensionMismatch,
  NonFinite,
  StructureMismatch,
  TooLarge,
  UnsupportedModel,
  InvalidOrder,
  InvalidShift,
  InvalidSpec,
  InvalidSize,
  DegenerateDenominator,
  ParseError,
  SelfLoop,
  EmptyGraph,
  CannotStabilize,
  InsufficientTrials,
  ConfigError,
  PreconditionViolated,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace opaug
