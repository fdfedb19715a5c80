#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pettis {

enum class ErrorCode {
  kInvariantViolation,
  kInvalidArgument,
  kDimensionMismatch,
  kNonNegligibleImaginaryPart,
  kNotNormalized,
  kGroupMismatch,
  kNoConvergence,
  kTermBudgetExceeded,
  kInconsistentOracle,
  kUndecidableInFreeRule,
  kUnregisteredGenerator,
  kUnregisteredShift,
  kMultipleSelected,
  kUnregisteredCell,
  kUnsupportedInput,
  kPartitionNotRegistered,
  kFilterViolation,
  kInconclusiveAlgebra,
  kNotIntermediate,
  kParseError,
  kValidationError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this one exception type; the
// code distinguishes the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace pettis
