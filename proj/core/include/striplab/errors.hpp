#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace striplab {

enum class ErrorCode {
  kInvalidArgument,
  kZeroColumn,
  kEmptySupport,
  kFullSupport,
  kIndexInSupport,
  kInvalidSupport,
  kNonConvergence,
  kNotPrime,
  kEmptySelection,
  kLengthMismatch,
  kDuplicateCodeword,
  kInvalidRank,
  kSizeOverBudget,
  kDegreeTooSmall,
  kRangeError,
  kBudgetExceeded,
  kInvalidQuery,
  kEpsOutOfRange,
  kAlphaBetaOrder,
  kInvalidMagnitudeRule,
  kRankDeficient,
  kMaxItersExceeded,
  kSupportMismatch,
  kBadMagic,
  kTruncatedPayload,
  kDimensionMismatch,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace striplab
