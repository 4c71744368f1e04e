#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spike {

enum class ErrorCode {
  Domain,
  Degenerate,
  StepUnderflow,
  NotReachable,
  NoBranch,
  WindowViolation,
  NoSignChange,
  PredicateAlwaysTrue,
  PredicateAlwaysFalse,
  Inconclusive,
  Usage,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NotReachable: return "NotReachable";
    case ErrorCode::NoBranch: return "NoBranch";
    case ErrorCode::WindowViolation: return "WindowViolation";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::PredicateAlwaysTrue: return "PredicateAlwaysTrue";
    case ErrorCode::PredicateAlwaysFalse: return "PredicateAlwaysFalse";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Library-wide exception. Every throw site in the library uses it so callers
/// (and the CLI error object) can switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spike
