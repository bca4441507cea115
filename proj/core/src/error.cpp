#include "oschom/error.hpp"

namespace oschom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::EmptyAdmissibleSet: return "EmptyAdmissibleSet";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::NoUnboundedComponent: return "NoUnboundedComponent";
    case ErrorCode::NoAdmissibleLevel: return "NoAdmissibleLevel";
    case ErrorCode::InfeasibleK: return "InfeasibleK";
    case ErrorCode::TolTooTight: return "TolTooTight";
    case ErrorCode::ClearanceViolation: return "ClearanceViolation";
    case ErrorCode::DomainViolation: return "DomainViolation";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace oschom
