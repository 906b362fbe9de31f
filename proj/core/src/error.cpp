#include "tokext/error.hpp"

namespace tokext {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMissingSymbol: return "MissingSymbol";
    case ErrorCode::kInvalidByteSequence: return "InvalidByteSequence";
    case ErrorCode::kInvalidTokenId: return "InvalidTokenId";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIncompatibleModels: return "IncompatibleModels";
    case ErrorCode::kKindConflict: return "KindConflict";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyContext: return "EmptyContext";
    case ErrorCode::kInvalidScore: return "InvalidScore";
    case ErrorCode::kBoundaryMerge: return "BoundaryMerge";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kJoinFailure: return "JoinFailure";
    case ErrorCode::kDuplicateSeries: return "DuplicateSeries";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace tokext
