#include "tokext/tokenizer.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "tokext/error.hpp"
#include "tokext/utf8.hpp"

namespace tokext {
namespace {

constexpr std::uint64_t pair_key(TokenId left, TokenId right) noexcept {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
         static_cast<std::uint32_t>(right);
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidModel, what);
}

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

constexpr char kHexDigits[] = "0123456789ABCDEF";

}  // namespace

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::kNormal: return "normal";
    case TokenKind::kByte: return "byte";
    case TokenKind::kSpecial: return "special";
  }
  return "normal";
}

std::optional<TokenKind> parse_token_kind(std::string_view name) noexcept {
  if (name == "normal") return TokenKind::kNormal;
  if (name == "byte") return TokenKind::kByte;
  if (name == "special") return TokenKind::kSpecial;
  return std::nullopt;
}

std::vector<std::string> default_specials() {
  return {std::string(kUnknownForm), std::string(kBeginForm),
          std::string(kEndForm)};
}

std::string byte_token_form(std::uint8_t value) {
  std::string form = "<0x";
  form.push_back(kHexDigits[value >> 4]);
  form.push_back(kHexDigits[value & 0x0F]);
  form.push_back('>');
  return form;
}

std::optional<std::uint8_t> parse_byte_token_form(std::string_view form) noexcept {
  if (form.size() != 6 || form.substr(0, 3) != "<0x" || form[5] != '>') {
    return std::nullopt;
  }
  const auto digit = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  const int hi = digit(form[3]);
  const int lo = digit(form[4]);
  if (hi < 0 || lo < 0) return std::nullopt;
  return static_cast<std::uint8_t>(hi * 16 + lo);
}

ModelParts make_base_parts(std::vector<std::string> specials, std::string marker,
                           bool byte_fallback) {
  ModelParts parts;
  parts.marker = std::move(marker);
  parts.byte_fallback = byte_fallback;
  parts.specials = std::move(specials);
  TokenId next = 0;
  for (const auto& form : parts.specials) {
    parts.vocab.push_back({form, next++, TokenKind::kSpecial});
  }
  if (byte_fallback) {
    for (int b = 0; b < 256; ++b) {
      parts.vocab.push_back(
          {byte_token_form(static_cast<std::uint8_t>(b)), next++, TokenKind::kByte});
    }
  }
  return parts;
}

TokenizerModel TokenizerModel::create(ModelParts parts) {
  TokenizerModel model;
  model.byte_ids_.fill(-1);

  if (parts.marker.empty() || !utf8::is_valid(parts.marker) ||
      utf8::split_chars(parts.marker).size() != 1) {
    invalid("marker must be a single UTF-8 character");
  }
  if (parts.vocab.size() >
      static_cast<std::size_t>(std::numeric_limits<TokenId>::max())) {
    invalid("vocabulary too large");
  }

  const std::size_t n_specials = parts.specials.size();
  std::size_t n_special_entries = 0;
  std::size_t n_byte_entries = 0;
  model.by_form_.reserve(parts.vocab.size());

  for (std::size_t i = 0; i < parts.vocab.size(); ++i) {
    const TokenEntry& e = parts.vocab[i];
    if (e.id != static_cast<TokenId>(i)) {
      invalid("vocab entry '" + e.form + "' has id " + std::to_string(e.id) +
              ", expected " + std::to_string(i));
    }
    if (e.form.empty()) invalid("empty token form at id " + std::to_string(i));
    if (!utf8::is_valid(e.form)) {
      invalid("token form at id " + std::to_string(i) + " is not valid UTF-8");
    }
    if (!model.by_form_.emplace(e.form, e.id).second) {
      invalid("duplicate token form '" + e.form + "'");
    }
    const auto byte_value = parse_byte_token_form(e.form);
    switch (e.kind) {
      case TokenKind::kByte:
        if (!byte_value) invalid("byte token with form '" + e.form + "'");
        model.byte_ids_[*byte_value] = e.id;
        ++n_byte_entries;
        break;
      case TokenKind::kSpecial:
        if (i >= n_specials || parts.specials[i] != e.form) {
          invalid("special token '" + e.form + "' out of layout position");
        }
        ++n_special_entries;
        break;
      case TokenKind::kNormal:
        if (byte_value) invalid("normal token uses reserved byte form '" + e.form + "'");
        break;
    }
  }
  if (n_special_entries != n_specials) {
    invalid("specials list does not match special-kind vocabulary entries");
  }
  if (n_byte_entries != 0 && n_byte_entries != 256) {
    invalid("byte tokens must be all-or-nothing, found " +
            std::to_string(n_byte_entries));
  }
  if (parts.byte_fallback && n_byte_entries != 256) {
    invalid("byte_fallback requires all 256 byte tokens");
  }
  for (int b = 0; b < 256 && n_byte_entries == 256; ++b) {
    if (model.byte_ids_[b] != static_cast<TokenId>(n_specials + b)) {
      invalid("byte token " + byte_token_form(static_cast<std::uint8_t>(b)) +
              " must have id " + std::to_string(n_specials + b));
    }
  }

  model.merge_index_.reserve(parts.merges.size());
  for (std::size_t r = 0; r < parts.merges.size(); ++r) {
    const MergeRule& m = parts.merges[r];
    if (m.rank != r) {
      invalid("merge " + std::to_string(r) + " has rank " + std::to_string(m.rank));
    }
    const auto resolve = [&](const std::string& form) {
      const auto it = model.by_form_.find(form);
      if (it == model.by_form_.end() ||
          parts.vocab[it->second].kind != TokenKind::kNormal) {
        invalid("merge " + std::to_string(r) + " references '" + form +
                "', not a normal vocabulary token");
      }
      return it->second;
    };
    const TokenId left = resolve(m.left);
    const TokenId right = resolve(m.right);
    const TokenId merged = resolve(m.left + m.right);
    const bool fresh = model.merge_index_
                           .emplace(pair_key(left, right),
                                    MergeTarget{static_cast<std::uint32_t>(r), merged})
                           .second;
    if (!fresh) invalid("duplicate merge (" + m.left + ", " + m.right + ")");
  }

  for (std::size_t i = 0; i < n_specials; ++i) {
    if (parts.specials[i] == kUnknownForm) model.unknown_id_ = static_cast<TokenId>(i);
    if (parts.specials[i] == kBeginForm) model.begin_id_ = static_cast<TokenId>(i);
  }
  model.parts_ = std::move(parts);
  return model;
}

const TokenEntry& TokenizerModel::entry(TokenId id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::kInvalidTokenId,
                "token id " + std::to_string(id) + " outside vocabulary of size " +
                    std::to_string(size()));
  }
  return parts_.vocab[static_cast<std::size_t>(id)];
}

std::optional<TokenId> TokenizerModel::find(std::string_view form) const {
  const auto it = by_form_.find(form);
  if (it == by_form_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> TokenizerModel::find_normal(std::string_view form) const {
  const auto id = find(form);
  if (!id || parts_.vocab[static_cast<std::size_t>(*id)].kind != TokenKind::kNormal) {
    return std::nullopt;
  }
  return id;
}

std::optional<TokenId> TokenizerModel::byte_id(std::uint8_t value) const noexcept {
  if (byte_ids_[value] < 0) return std::nullopt;
  return byte_ids_[value];
}

const TokenizerModel::MergeTarget* TokenizerModel::find_merge(
    TokenId left, TokenId right) const noexcept {
  const auto it = merge_index_.find(pair_key(left, right));
  return it == merge_index_.end() ? nullptr : &it->second;
}

std::vector<std::string> pretokenize(std::string_view text, std::string_view marker) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos == text.size()) break;
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    std::string word;
    word.reserve(marker.size() + pos - start);
    word.append(marker);
    word.append(text.substr(start, pos - start));
    words.push_back(std::move(word));
  }
  return words;
}

void encode_pretoken(const TokenizerModel& model, std::string_view pretoken,
                     std::vector<TokenId>& out) {
  struct Symbol {
    TokenId id;  // -1 when the character is not a normal vocabulary token
    std::string_view text;
  };
  std::vector<Symbol> symbols;
  for (std::string_view ch : utf8::split_chars(pretoken)) {
    symbols.push_back({model.find_normal(ch).value_or(-1), ch});
  }

  // Lowest rank wins; the strict comparison keeps the leftmost position when
  // the same rule applies at several places.
  while (symbols.size() > 1) {
    std::uint32_t best_rank = std::numeric_limits<std::uint32_t>::max();
    std::size_t best_pos = 0;
    TokenId best_merged = -1;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      if (symbols[i].id < 0 || symbols[i + 1].id < 0) continue;
      const auto* m = model.find_merge(symbols[i].id, symbols[i + 1].id);
      if (m != nullptr && m->rank < best_rank) {
        best_rank = m->rank;
        best_pos = i;
        best_merged = m->merged;
      }
    }
    if (best_merged < 0) break;
    Symbol& s = symbols[best_pos];
    s.id = best_merged;
    s.text = std::string_view(s.text.data(),
                              s.text.size() + symbols[best_pos + 1].text.size());
    symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
  }

  for (const Symbol& s : symbols) {
    if (s.id >= 0) {
      out.push_back(s.id);
    } else if (model.byte_fallback()) {
      for (char c : s.text) {
        out.push_back(*model.byte_id(static_cast<std::uint8_t>(c)));
      }
    } else if (const auto unk = model.unknown_id()) {
      out.push_back(*unk);
    } else {
      throw Error(ErrorCode::kMissingSymbol,
                  "symbol '" + std::string(s.text) +
                      "' not in vocabulary and byte fallback is off");
    }
  }
}

TokenSequence encode(const TokenizerModel& model, std::string_view text,
                     EncodeOptions options) {
  if (const auto bad = utf8::find_invalid(text)) {
    throw Error(ErrorCode::kInvalidByteSequence,
                "input is not valid UTF-8 at byte offset " + std::to_string(*bad));
  }
  TokenSequence seq;
  if (options.add_begin) {
    const auto bos = model.begin_id();
    if (!bos) {
      throw Error(ErrorCode::kMissingSymbol, "model has no <s> special token");
    }
    seq.ids.push_back(*bos);
  }
  for (const auto& word : pretokenize(text, model.marker())) {
    encode_pretoken(model, word, seq.ids);
  }
  return seq;
}

std::vector<TokenSequence> encode_batch(const TokenizerModel& model,
                                        std::span<const std::string> texts,
                                        unsigned threads) {
  std::vector<TokenSequence> out(texts.size());
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, texts.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < texts.size(); ++i) out[i] = encode(model, texts[i]);
    return out;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < texts.size(); i += workers) {
            out[i] = encode(model, texts[i]);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return out;
}

std::string decode(const TokenizerModel& model, std::span<const TokenId> ids) {
  std::string text;
  std::size_t i = 0;
  while (i < ids.size()) {
    const TokenEntry& e = model.entry(ids[i]);
    if (e.kind == TokenKind::kSpecial) {
      ++i;
      continue;
    }
    if (e.kind == TokenKind::kNormal) {
      text += e.form;
      ++i;
      continue;
    }
    const std::size_t run_start = i;
    std::string bytes;
    while (i < ids.size() && model.entry(ids[i]).kind == TokenKind::kByte) {
      bytes.push_back(static_cast<char>(*parse_byte_token_form(model.entry(ids[i]).form)));
      ++i;
    }
    if (const auto bad = utf8::find_invalid(bytes)) {
      throw Error(ErrorCode::kInvalidByteSequence,
                  "byte tokens do not form valid UTF-8 at token offset " +
                      std::to_string(run_start + *bad));
    }
    text += bytes;
  }

  std::string out;
  out.reserve(text.size());
  const std::string& marker = model.marker();
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text.compare(pos, marker.size(), marker) == 0) {
      out.push_back(' ');
      pos += marker.size();
    } else {
      out.push_back(text[pos++]);
    }
  }
  if (!out.empty() && out.front() == ' ') out.erase(0, 1);
  return out;
}

std::vector<std::string> token_forms(const TokenizerModel& model,
                                     std::span<const TokenId> ids) {
  std::vector<std::string> forms;
  forms.reserve(ids.size());
  for (TokenId id : ids) forms.push_back(model.entry(id).form);
  return forms;
}

}  // namespace tokext
