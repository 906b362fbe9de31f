#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tokext/tokenizer.hpp"

namespace tokext {

/// Appends addon vocabulary and merges to `base`.
///
/// Base entries keep their ids; addon normal forms missing from base follow
/// in addon-id order. Addon merges come after every base merge, skipping any
/// that repeat a base rule, so base merges always take priority. Specials and
/// flags come from base; addon specials and byte tokens must already exist in
/// base with the same kind.
///
/// Throws kIncompatibleModels when markers differ or a shared byte token sits
/// at a different id, and kKindConflict when one form has different kinds.
TokenizerModel extend(const TokenizerModel& base, const TokenizerModel& addon);

// Tokens emitted over a sentence set, specials excluded.
struct TokenStatistics {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t byte_tokens = 0;

  double unknown_token_rate() const noexcept;
  double average_tokens() const noexcept;
};

TokenStatistics token_statistics(const TokenizerModel& model,
                                 std::span<const std::string> sentences,
                                 unsigned threads = 1);

// Byte-fallback tokens over all non-special tokens. Throws kEmptyInput.
double unknown_token_rate(const TokenizerModel& model,
                          std::span<const std::string> sentences);

// Mean non-special token count per sentence. Throws kEmptyInput.
double average_tokens(const TokenizerModel& model, std::span<const std::string> sentences);

struct ComparisonRow {
  std::string tokenizer_label;
  bool extended = false;
  double unknown_token_rate = 0.0;
  double avg_tokens_per_sentence = 0.0;
};

struct LabeledModel {
  std::string label;
  std::reference_wrapper<const TokenizerModel> model;
};

// One row per model, in input order.
std::vector<ComparisonRow> compare(std::span<const LabeledModel> models,
                                   std::span<const std::string> sentences,
                                   unsigned threads = 1);

// `label,extended,unknown_token_rate,avg_tokens_per_sentence`; rate with four
// decimals, average with two.
std::string comparison_csv(std::span<const ComparisonRow> rows);

}  // namespace tokext
