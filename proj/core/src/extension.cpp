#include "tokext/extension.hpp"

#include <set>
#include <utility>

#include "tokext/csv.hpp"
#include "tokext/error.hpp"

namespace tokext {

TokenizerModel extend(const TokenizerModel& base, const TokenizerModel& addon) {
  if (base.marker() != addon.marker()) {
    throw Error(ErrorCode::kIncompatibleModels, "base and addon use different markers");
  }
  if (base.byte_fallback() != addon.byte_fallback()) {
    throw Error(ErrorCode::kIncompatibleModels, "base and addon disagree on byte fallback");
  }
  for (int b = 0; b < 256; ++b) {
    const auto value = static_cast<std::uint8_t>(b);
    const auto addon_id = addon.byte_id(value);
    if (addon_id && base.byte_id(value) != addon_id) {
      throw Error(ErrorCode::kIncompatibleModels,
                  "byte token " + byte_token_form(value) +
                      " has a different id in base and addon");
    }
  }

  ModelParts parts = base.parts();
  const std::size_t base_size = parts.vocab.size();
  const std::size_t base_merges = parts.merges.size();

  for (const TokenEntry& e : addon.parts().vocab) {
    if (const auto id = base.find(e.form)) {
      const TokenKind existing = base.kind(*id);
      if (existing != e.kind) {
        throw Error(ErrorCode::kKindConflict,
                    "form '" + e.form + "' is " + std::string(to_string(existing)) +
                        " in base but " + std::string(to_string(e.kind)) + " in addon");
      }
      continue;
    }
    // Addon-only specials are dropped; the special set comes from base.
    if (e.kind != TokenKind::kNormal) continue;
    parts.vocab.push_back({e.form, static_cast<TokenId>(parts.vocab.size()), e.kind});
  }

  std::set<std::pair<std::string_view, std::string_view>> known;
  for (const MergeRule& m : base.merges()) known.emplace(m.left, m.right);
  for (const MergeRule& m : addon.merges()) {
    if (known.contains({m.left, m.right})) continue;
    parts.merges.push_back({m.left, m.right, parts.merges.size()});
  }

  if (parts.vocab.size() != base_size || parts.merges.size() != base_merges) {
    parts.extended = true;
  }
  return TokenizerModel::create(std::move(parts));
}

double TokenStatistics::unknown_token_rate() const noexcept {
  return tokens == 0 ? 0.0 : static_cast<double>(byte_tokens) / static_cast<double>(tokens);
}

double TokenStatistics::average_tokens() const noexcept {
  return sentences == 0 ? 0.0
                        : static_cast<double>(tokens) / static_cast<double>(sentences);
}

TokenStatistics token_statistics(const TokenizerModel& model,
                                 std::span<const std::string> sentences,
                                 unsigned threads) {
  if (sentences.empty()) throw Error(ErrorCode::kEmptyInput, "no sentences");
  TokenStatistics stats;
  stats.sentences = sentences.size();
  for (const TokenSequence& seq : encode_batch(model, sentences, threads)) {
    for (TokenId id : seq.ids) {
      const TokenKind kind = model.kind(id);
      if (kind == TokenKind::kSpecial) continue;
      ++stats.tokens;
      if (kind == TokenKind::kByte) ++stats.byte_tokens;
    }
  }
  return stats;
}

double unknown_token_rate(const TokenizerModel& model,
                          std::span<const std::string> sentences) {
  return token_statistics(model, sentences).unknown_token_rate();
}

double average_tokens(const TokenizerModel& model, std::span<const std::string> sentences) {
  return token_statistics(model, sentences).average_tokens();
}

std::vector<ComparisonRow> compare(std::span<const LabeledModel> models,
                                   std::span<const std::string> sentences,
                                   unsigned threads) {
  if (models.empty()) throw Error(ErrorCode::kEmptyInput, "no tokenizers to compare");
  std::vector<ComparisonRow> rows;
  rows.reserve(models.size());
  for (const LabeledModel& m : models) {
    const TokenStatistics stats = token_statistics(m.model.get(), sentences, threads);
    rows.push_back({m.label, m.model.get().extended(), stats.unknown_token_rate(),
                    stats.average_tokens()});
  }
  return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::string out;
  csv::append_row(out, {"label", "extended", "unknown_token_rate", "avg_tokens_per_sentence"});
  for (const ComparisonRow& row : rows) {
    csv::append_row(out, {row.tokenizer_label, row.extended ? "true" : "false",
                          csv::format_fixed(row.unknown_token_rate, 4),
                          csv::format_fixed(row.avg_tokens_per_sentence, 2)});
  }
  return out;
}

}  // namespace tokext
