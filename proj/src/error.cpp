#include "pettis/error.hpp"

namespace pettis {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonNegligibleImaginaryPart: return "NonNegligibleImaginaryPart";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kGroupMismatch: return "GroupMismatch";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kTermBudgetExceeded: return "TermBudgetExceeded";
    case ErrorCode::kInconsistentOracle: return "InconsistentOracle";
    case ErrorCode::kUndecidableInFreeRule: return "UndecidableInFreeRule";
    case ErrorCode::kUnregisteredGenerator: return "UnregisteredGenerator";
    case ErrorCode::kUnregisteredShift: return "UnregisteredShift";
    case ErrorCode::kMultipleSelected: return "MultipleSelected";
    case ErrorCode::kUnregisteredCell: return "UnregisteredCell";
    case ErrorCode::kUnsupportedInput: return "UnsupportedInput";
    case ErrorCode::kPartitionNotRegistered: return "PartitionNotRegistered";
    case ErrorCode::kFilterViolation: return "FilterViolation";
    case ErrorCode::kInconclusiveAlgebra: return "InconclusiveAlgebra";
    case ErrorCode::kNotIntermediate: return "NotIntermediate";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pettis
