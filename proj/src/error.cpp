#include "lanesel/error.hpp"

namespace lanesel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidField: return "InvalidField";
    case ErrorCode::kMalformedBeacon: return "MalformedBeacon";
    case ErrorCode::kEmptyWindow: return "EmptyWindow";
    case ErrorCode::kEmptyFleet: return "EmptyFleet";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kZeroObservations: return "ZeroObservations";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kUnknownDecider: return "UnknownDecider";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kStaleAdvice: return "StaleAdvice";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kRunFailure: return "RunFailure";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
  }
  return "Unknown";
}

}  // namespace lanesel
