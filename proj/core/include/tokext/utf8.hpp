#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokext::utf8 {

// Byte offset of the first ill-formed sequence, or nullopt when `text` is
// well-formed UTF-8. Overlong forms, surrogates and code points above
// U+10FFFF are rejected.
std::optional<std::size_t> find_invalid(std::string_view text) noexcept;

inline bool is_valid(std::string_view text) noexcept {
  return !find_invalid(text).has_value();
}

// Splits well-formed UTF-8 into one view per code point. Views alias `text`.
std::vector<std::string_view> split_chars(std::string_view text);

void append(std::string& out, char32_t code_point);

std::string encode(std::u32string_view code_points);

// Decodes well-formed UTF-8; throws Error(kInvalidByteSequence) otherwise.
std::u32string decode(std::string_view text);

// Text normalization used by the optional NFC switch (ICU-backed).
std::string nfc(std::string_view text);

}  // namespace tokext::utf8
