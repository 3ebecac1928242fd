// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace risplace {

enum class ErrorCode {
  NonPositiveDistance,
  CoincidentPoints,
  DimensionMismatch,
  EmptyGrid,
  RejectionOverflow,
  InfeasibleQuadrant,
  EmptyInput,
  NonFiniteObjective,
  ParseError,
  ValidationError,
  IoError,
  VerifyMismatch,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `field()` is populated for
/// validation failures and names the offending scenario key path.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::string field = {})
      : std::runtime_error(what), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace risplace
