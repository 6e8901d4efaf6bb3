#include "striplab/errors.hpp"

namespace striplab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kZeroColumn: return "ZeroColumn";
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kFullSupport: return "FullSupport";
    case ErrorCode::kIndexInSupport: return "IndexInSupport";
    case ErrorCode::kInvalidSupport: return "InvalidSupport";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kNotPrime: return "NotPrime";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDuplicateCodeword: return "DuplicateCodeword";
    case ErrorCode::kInvalidRank: return "InvalidRank";
    case ErrorCode::kSizeOverBudget: return "SizeOverBudget";
    case ErrorCode::kDegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kInvalidQuery: return "InvalidQuery";
    case ErrorCode::kEpsOutOfRange: return "EpsOutOfRange";
    case ErrorCode::kAlphaBetaOrder: return "AlphaBetaOrder";
    case ErrorCode::kInvalidMagnitudeRule: return "InvalidMagnitudeRule";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kMaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace striplab
