#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iclscope {

// Machine-readable failure categories. The CLI prints `error: <code>: <message>`.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kMalformedManifest,
  kMissingBlob,
  kBlobSize,
  kDanglingIndex,
  kInvariantViolation,
  kDuplicateRecord,
  kShapeMismatch,
  kNoNumberFound,
  kUnreachable,
  kSingularMatrix,
  kInvalidGamma,
  kEmptyConditionSet,
  kPoolExhausted,
  kEmptySelection,
  kZeroVector,
  kMissingLabel,
  kOrderMismatch,
  kDegenerateHypothesis,
  kUnknownRole,
  kSubstringNotFound,
  kAmbiguousSubstring,
  kEmptySet,
  kZeroDenominator,
  kNoAttentionAtLayer,
  kSingleClass,
  kDimensionMismatch,
  kClassTooSmall,
  kConstantInput,
  kTooFewSamples,
  kTooFewGroups,
  kDegenerateCorrelation,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iclscope
