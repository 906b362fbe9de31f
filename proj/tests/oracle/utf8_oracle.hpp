#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Reference UTF-8 routines written from the encoding table, independent of
// the library's codec.
namespace tokext::oracle {

inline std::string utf8_encode(std::u32string_view code_points) {
  std::string out;
  for (char32_t cp : code_points) {
    const auto v = static_cast<std::uint32_t>(cp);
    if (v < 0x80) {
      out += static_cast<char>(v);
    } else if (v < 0x800) {
      out += static_cast<char>(0xC0 | (v >> 6));
      out += static_cast<char>(0x80 | (v & 0x3F));
    } else if (v < 0x10000) {
      out += static_cast<char>(0xE0 | (v >> 12));
      out += static_cast<char>(0x80 | ((v >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (v & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (v >> 18));
      out += static_cast<char>(0x80 | ((v >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((v >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (v & 0x3F));
    }
  }
  return out;
}

// Splits well-formed UTF-8 by lead-byte length.
inline std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t n = 1;
    if (lead >= 0xF0) {
      n = 4;
    } else if (lead >= 0xE0) {
      n = 3;
    } else if (lead >= 0xC0) {
      n = 2;
    }
    chars.emplace_back(text.substr(i, n));
    i += n;
  }
  return chars;
}

}  // namespace tokext::oracle
