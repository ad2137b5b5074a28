#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aoi {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNotMonotone,
  kNonFinite,
  kNegativeAge,
  kNegativeArgument,
  kInvalidInterval,
  kBadState,
  kSingularSystem,
  kNonConvergence,
  kStepBreaksMonotonicity,
  kBudgetExceeded,
  kBracketInvalid,
  kZeroMeasurementWindow,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotMonotone: return "NotMonotone";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNegativeAge: return "NegativeAge";
    case ErrorCode::kNegativeArgument: return "NegativeArgument";
    case ErrorCode::kInvalidInterval: return "InvalidInterval";
    case ErrorCode::kBadState: return "BadState";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kStepBreaksMonotonicity: return "StepBreaksMonotonicity";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kBracketInvalid: return "BracketInvalid";
    case ErrorCode::kZeroMeasurementWindow: return "ZeroMeasurementWindow";
  }
  return "Unknown";
}

// All library failures surface as aoi::Error; what() is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aoi
