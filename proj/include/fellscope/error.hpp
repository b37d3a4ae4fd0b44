#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fellscope {

enum class ErrorKind {
  InvalidEndpoint,
  EmptySet,
  InvalidEpsilon,
  NotCompact,
  DimensionMismatch,
  BadWindow,
  InvalidConfig,
  DomainMismatch,
  TooLarge,
  ValidationFailed,
  FormatError,
  UnknownScenario,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every contract violation raised by the library carries one of the kinds
/// above so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidEndpoint: return "InvalidEndpoint";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorKind::NotCompact: return "NotCompact";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadWindow: return "BadWindow";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace fellscope
