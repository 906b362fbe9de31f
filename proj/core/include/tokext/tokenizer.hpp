#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokext {

using TokenId = std::int32_t;

enum class TokenKind : std::uint8_t { kNormal, kByte, kSpecial };

std::string_view to_string(TokenKind kind) noexcept;
std::optional<TokenKind> parse_token_kind(std::string_view name) noexcept;

// U+2581 LOWER ONE EIGHTH BLOCK, the SentencePiece word-boundary marker.
inline constexpr std::string_view kDefaultMarker = "\xE2\x96\x81";
inline constexpr std::string_view kUnknownForm = "<unk>";
inline constexpr std::string_view kBeginForm = "<s>";
inline constexpr std::string_view kEndForm = "</s>";

std::vector<std::string> default_specials();

// "<0xHH>" with uppercase hex.
std::string byte_token_form(std::uint8_t value);
std::optional<std::uint8_t> parse_byte_token_form(std::string_view form) noexcept;

struct TokenEntry {
  std::string form;
  TokenId id = 0;
  TokenKind kind = TokenKind::kNormal;

  bool operator==(const TokenEntry&) const = default;
};

struct MergeRule {
  std::string left;
  std::string right;
  std::size_t rank = 0;

  bool operator==(const MergeRule&) const = default;
};

struct TokenSequence {
  std::vector<TokenId> ids;

  std::size_t size() const noexcept { return ids.size(); }
  bool empty() const noexcept { return ids.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

// Plain description of a model. TokenizerModel::create validates one and
// builds the lookup indices; parts() hands it back unchanged.
//
// Layout: specials occupy ids 0..|specials|-1 in list order, byte tokens (when
// present) follow contiguously in byte order, normal tokens come after.
struct ModelParts {
  std::string marker = std::string(kDefaultMarker);
  bool byte_fallback = true;
  std::vector<std::string> specials;
  std::vector<TokenEntry> vocab;
  std::vector<MergeRule> merges;
  // Set by extend() once addon content has been appended.
  bool extended = false;

  bool operator==(const ModelParts&) const = default;
};

// Starting layout for a new model: specials, then all 256 byte tokens when
// byte_fallback is set.
ModelParts make_base_parts(std::vector<std::string> specials,
                           std::string marker = std::string(kDefaultMarker),
                           bool byte_fallback = true);

// Immutable after construction; safe for concurrent read-only use.
class TokenizerModel {
 public:
  struct MergeTarget {
    std::uint32_t rank;
    TokenId merged;
  };

  // Throws Error(kInvalidModel) naming the first violated invariant.
  static TokenizerModel create(ModelParts parts);

  const ModelParts& parts() const noexcept { return parts_; }
  std::size_t size() const noexcept { return parts_.vocab.size(); }
  const std::string& marker() const noexcept { return parts_.marker; }
  bool byte_fallback() const noexcept { return parts_.byte_fallback; }
  bool extended() const noexcept { return parts_.extended; }
  std::span<const MergeRule> merges() const noexcept { return parts_.merges; }

  const TokenEntry& entry(TokenId id) const;
  TokenKind kind(TokenId id) const { return entry(id).kind; }
  bool contains(TokenId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < size();
  }

  std::optional<TokenId> find(std::string_view form) const;
  // Only normal-kind entries; used when mapping text symbols to ids.
  std::optional<TokenId> find_normal(std::string_view form) const;
  std::optional<TokenId> byte_id(std::uint8_t value) const noexcept;
  std::optional<TokenId> unknown_id() const noexcept { return unknown_id_; }
  std::optional<TokenId> begin_id() const noexcept { return begin_id_; }

  const MergeTarget* find_merge(TokenId left, TokenId right) const noexcept;

  bool operator==(const TokenizerModel& other) const {
    return parts_ == other.parts_;
  }

 private:
  TokenizerModel() = default;

  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  ModelParts parts_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> by_form_;
  std::unordered_map<std::uint64_t, MergeTarget> merge_index_;
  std::array<TokenId, 256> byte_ids_{};
  std::optional<TokenId> unknown_id_;
  std::optional<TokenId> begin_id_;
};

// Whitespace-run splitting with the marker prefixed to every word.
std::vector<std::string> pretokenize(std::string_view text,
                                     std::string_view marker = kDefaultMarker);

struct EncodeOptions {
  bool add_begin = false;  // emit the "<s>" special first
};

TokenSequence encode(const TokenizerModel& model, std::string_view text,
                     EncodeOptions options = {});

// Encodes one marker-prefixed pretoken.
void encode_pretoken(const TokenizerModel& model, std::string_view pretoken,
                     std::vector<TokenId>& out);

// Encodes every text on `threads` workers; output order matches input order.
std::vector<TokenSequence> encode_batch(const TokenizerModel& model,
                                        std::span<const std::string> texts,
                                        unsigned threads = 1);

std::string decode(const TokenizerModel& model, std::span<const TokenId> ids);
inline std::string decode(const TokenizerModel& model, const TokenSequence& seq) {
  return decode(model, std::span<const TokenId>(seq.ids));
}

std::vector<std::string> token_forms(const TokenizerModel& model,
                                     std::span<const TokenId> ids);

}  // namespace tokext
