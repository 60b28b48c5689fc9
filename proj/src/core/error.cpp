#include "iclscope/error.hpp"

namespace iclscope {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMalformedManifest: return "MalformedManifest";
    case ErrorCode::kMissingBlob: return "MissingBlob";
    case ErrorCode::kBlobSize: return "BlobSize";
    case ErrorCode::kDanglingIndex: return "DanglingIndex";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kDuplicateRecord: return "DuplicateRecord";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNoNumberFound: return "NoNumberFound";
    case ErrorCode::kUnreachable: return "Unreachable";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kInvalidGamma: return "InvalidGamma";
    case ErrorCode::kEmptyConditionSet: return "EmptyConditionSet";
    case ErrorCode::kPoolExhausted: return "PoolExhausted";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kOrderMismatch: return "OrderMismatch";
    case ErrorCode::kDegenerateHypothesis: return "DegenerateHypothesis";
    case ErrorCode::kUnknownRole: return "UnknownRole";
    case ErrorCode::kSubstringNotFound: return "SubstringNotFound";
    case ErrorCode::kAmbiguousSubstring: return "AmbiguousSubstring";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kNoAttentionAtLayer: return "NoAttentionAtLayer";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kConstantInput: return "ConstantInput";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kTooFewGroups: return "TooFewGroups";
    case ErrorCode::kDegenerateCorrelation: return "DegenerateCorrelation";
  }
  return "Unknown";
}

}  // namespace iclscope
