#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gosbounds {

enum class ErrorCode {
  EmptyVector,
  NonPositiveGamma,
  IndexOutOfRange,
  InvalidModelParameters,
  DomainError,
  InvalidTolerances,
  NoSignChange,
  UnsupportedByTheory,
  WrongCase,
  RootNotFound,
  NegativeCSquared,
  DenominatorNonpositive,
  NoInflectionPoint,
  NoBetaHat,
  ConditionFails,
  InvalidCoefficients,
  NonMonotoneBranch,
  InvalidAlpha,
  NonFiniteSample,
  IOError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidModelParameters: return "InvalidModelParameters";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidTolerances: return "InvalidTolerances";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::UnsupportedByTheory: return "UnsupportedByTheory";
    case ErrorCode::WrongCase: return "WrongCase";
    case ErrorCode::RootNotFound: return "RootNotFound";
    case ErrorCode::NegativeCSquared: return "NegativeCSquared";
    case ErrorCode::DenominatorNonpositive: return "DenominatorNonpositive";
    case ErrorCode::NoInflectionPoint: return "NoInflectionPoint";
    case ErrorCode::NoBetaHat: return "NoBetaHat";
    case ErrorCode::ConditionFails: return "ConditionFails";
    case ErrorCode::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorCode::NonMonotoneBranch: return "NonMonotoneBranch";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures that mean "outside the theory" rather than a
  /// numerical breakdown.
  bool unsupported() const noexcept {
    return code_ == ErrorCode::UnsupportedByTheory || code_ == ErrorCode::ConditionFails;
  }

 private:
  ErrorCode code_;
};

}  // namespace gosbounds
