#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tokext/tokenizer.hpp"

namespace tokext {

inline constexpr int kTokenizerFormatVersion = 1;

// JSON interchange document:
//   format_version, marker, byte_fallback, specials, vocab [{form,id,kind}] in
//   id order, merges [[left,right]] in rank order, and "extended": true only
//   for models produced by extend().
// One vocab entry / merge per line so files diff cleanly.
std::string serialize_tokenizer(const TokenizerModel& model);

// Validates every model invariant. Throws kParseError on malformed JSON,
// kUnsupportedFormat on an unknown format_version, kInvalidModel otherwise.
TokenizerModel parse_tokenizer(std::string_view document);

TokenizerModel load_tokenizer(const std::filesystem::path& path);
void save_tokenizer(const TokenizerModel& model, const std::filesystem::path& path);

}  // namespace tokext
