#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ktrace {

enum class ErrorCode {
  InvalidArgument,
  NotSelfAdjoint,
  NumericalFailure,
  DomainExceeded,
  SpectralGapViolation,
  NotNearProjection,
  TooFarApart,
  CornerNotInvertible,
  RangeMismatch,
  NotProjection,
  NotInvertible,
  NotPositive,
  RankExceedsCorner,
  OutsideIdeal,
  NotInKernel,
  NotStrictlyPositive,
  EmptyInput,
  NotInScale,
  ConfigInvalid,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::DomainExceeded: return "DomainExceeded";
    case ErrorCode::SpectralGapViolation: return "SpectralGapViolation";
    case ErrorCode::NotNearProjection: return "NotNearProjection";
    case ErrorCode::TooFarApart: return "TooFarApart";
    case ErrorCode::CornerNotInvertible: return "CornerNotInvertible";
    case ErrorCode::RangeMismatch: return "RangeMismatch";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::RankExceedsCorner: return "RankExceedsCorner";
    case ErrorCode::OutsideIdeal: return "OutsideIdeal";
    case ErrorCode::NotInKernel: return "NotInKernel";
    case ErrorCode::NotStrictlyPositive: return "NotStrictlyPositive";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NotInScale: return "NotInScale";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace ktrace
