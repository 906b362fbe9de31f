#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "tokext/error.hpp"
#include "tokext/utf8.hpp"

namespace tokext::utf8 {

std::string nfc(std::string_view text) {
  if (const auto bad = find_invalid(text)) {
    throw Error(ErrorCode::kInvalidByteSequence,
                "ill-formed UTF-8 at byte offset " + std::to_string(*bad));
  }
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kConfigError, "ICU NFC normalizer unavailable");
  }
  const auto source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString normalized = normalizer->normalize(source, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument, u_errorName(status));
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

}  // namespace tokext::utf8
