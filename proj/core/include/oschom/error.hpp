#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oschom {

enum class ErrorCode {
  InvalidArgument,
  ConfigError,
  IoError,
  LevelOutOfRange,
  UnsupportedKind,
  EmptyAdmissibleSet,
  Unreachable,
  NoUnboundedComponent,
  NoAdmissibleLevel,
  InfeasibleK,
  TolTooTight,
  ClearanceViolation,
  DomainViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace oschom
