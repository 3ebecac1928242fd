// SPDX-License-Identifier: Apache-2.0
#include "risplace/error.hpp"

namespace risplace {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::RejectionOverflow: return "RejectionOverflow";
    case ErrorCode::InfeasibleQuadrant: return "InfeasibleQuadrant";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::VerifyMismatch: return "VerifyMismatch";
  }
  return "Unknown";
}

}  // namespace risplace
