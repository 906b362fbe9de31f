#include "tokext/utf8.hpp"

#include "tokext/error.hpp"

namespace tokext::utf8 {
namespace {

// Length of the well-formed sequence starting at `pos`, or 0 if ill-formed.
std::size_t sequence_length(std::string_view text, std::size_t pos) noexcept {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(text[i]);
  };
  const unsigned char lead = byte(pos);
  const std::size_t remaining = text.size() - pos;
  if (lead < 0x80) return 1;

  std::size_t length = 0;
  unsigned char lo = 0x80;
  unsigned char hi = 0xBF;
  if (lead >= 0xC2 && lead <= 0xDF) {
    length = 2;
  } else if (lead >= 0xE0 && lead <= 0xEF) {
    length = 3;
    if (lead == 0xE0) lo = 0xA0;  // overlong
    if (lead == 0xED) hi = 0x9F;  // surrogates
  } else if (lead >= 0xF0 && lead <= 0xF4) {
    length = 4;
    if (lead == 0xF0) lo = 0x90;  // overlong
    if (lead == 0xF4) hi = 0x8F;  // > U+10FFFF
  } else {
    return 0;
  }
  if (remaining < length) return 0;
  if (byte(pos + 1) < lo || byte(pos + 1) > hi) return 0;
  for (std::size_t i = 2; i < length; ++i) {
    if ((byte(pos + i) & 0xC0) != 0x80) return 0;
  }
  return length;
}

}  // namespace

std::optional<std::size_t> find_invalid(std::string_view text) noexcept {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t length = sequence_length(text, pos);
    if (length == 0) return pos;
    pos += length;
  }
  return std::nullopt;
}

std::vector<std::string_view> split_chars(std::string_view text) {
  std::vector<std::string_view> chars;
  chars.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t length = sequence_length(text, pos);
    if (length == 0) {
      throw Error(ErrorCode::kInvalidByteSequence,
                  "ill-formed UTF-8 at byte offset " + std::to_string(pos));
    }
    chars.push_back(text.substr(pos, length));
    pos += length;
  }
  return chars;
}

void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    if (cp >= 0xD800 && cp <= 0xDFFF) {
      throw Error(ErrorCode::kInvalidByteSequence, "surrogate code point");
    }
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0x10FFFF) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    throw Error(ErrorCode::kInvalidByteSequence, "code point above U+10FFFF");
  }
}

std::string encode(std::u32string_view code_points) {
  std::string out;
  out.reserve(code_points.size() * 2);
  for (char32_t cp : code_points) append(out, cp);
  return out;
}

std::u32string decode(std::string_view text) {
  std::u32string out;
  for (std::string_view ch : split_chars(text)) {
    const auto b0 = static_cast<unsigned char>(ch[0]);
    char32_t cp = 0;
    switch (ch.size()) {
      case 1: cp = b0; break;
      case 2: cp = b0 & 0x1F; break;
      case 3: cp = b0 & 0x0F; break;
      default: cp = b0 & 0x07; break;
    }
    for (std::size_t i = 1; i < ch.size(); ++i) {
      cp = (cp << 6) | (static_cast<unsigned char>(ch[i]) & 0x3F);
    }
    out.push_back(cp);
  }
  return out;
}

}  // namespace tokext::utf8
