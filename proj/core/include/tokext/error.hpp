#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tokext {

enum class ErrorCode {
  kMissingSymbol,
  kInvalidByteSequence,
  kInvalidTokenId,
  kInvalidModel,
  kUnsupportedFormat,
  kParseError,
  kEmptyCorpus,
  kConfigError,
  kIncompatibleModels,
  kKindConflict,
  kEmptyInput,
  kEmptyContext,
  kInvalidScore,
  kBoundaryMerge,
  kInvalidArgument,
  kJoinFailure,
  kDuplicateSeries,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tokext
