#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace covr {

enum class ErrorCode {
  kContract,
  kUnknownSlot,
  kSlotOverflow,
  kSchemaError,
  kValidationError,
  kZeroWeightSum,
  kEmptySequence,
  kZeroVector,
  kBackendUnavailable,
  kVideoUnreadable,
  kDimensionMismatch,
  kAllVideosFailed,
  kEmptyIndex,
  kCorruptCache,
  kTraceUnparseable,
  kEmptyOutcomes,
  kJudgeUnavailable,
  kMalformedJudgeResponse,
  kEmptyInput,
  kMissingTarget,
  kMissingDescriptions,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// All engine failures surface as covr::Error; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace covr
