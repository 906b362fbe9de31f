#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tokext/tokenizer.hpp"

namespace tokext {

// Log-probability distribution over a vocabulary for one prediction step.
class ScoreVector {
 public:
  // Log-softmax of raw scores.
  static ScoreVector from_logits(std::span<const double> logits);
  static ScoreVector uniform(std::size_t vocab_size);

  std::span<const double> logprobs() const noexcept { return logprobs_; }
  std::size_t size() const noexcept { return logprobs_.size(); }
  double logprob(TokenId id) const;
  double probability(TokenId id) const;

  // Ties resolve to the lowest id.
  TokenId argmax() const noexcept { return argmax_; }
  double max_logprob() const noexcept { return logprobs_[static_cast<std::size_t>(argmax_)]; }

  // log(sum(exp(logprobs))); zero for a proper distribution.
  double log_normalizer() const noexcept;

 private:
  explicit ScoreVector(std::vector<double> logprobs);

  std::vector<double> logprobs_;
  TokenId argmax_ = 0;
};

double logsumexp(std::span<const double> values) noexcept;

// Maps a context to a distribution over the next token. Implementations are
// immutable once built and may be scored concurrently.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::size_t vocab_size() const = 0;
  // Models that cannot score an empty context; score() then throws
  // kEmptyContext.
  virtual bool requires_history() const { return false; }

  ScoreVector score(std::span<const TokenId> context) const;

 protected:
  virtual ScoreVector score_context(std::span<const TokenId> context) const = 0;
};

class UniformModel final : public LanguageModel {
 public:
  explicit UniformModel(std::size_t vocab_size);
  std::size_t vocab_size() const override { return vocab_size_; }

 protected:
  ScoreVector score_context(std::span<const TokenId> context) const override;

 private:
  std::size_t vocab_size_;
};

inline constexpr TokenId kPadToken = -1;

// Add-k smoothed n-gram model. Each training sequence is begin-padded with
// n-1 kPadToken entries, so every context has exactly n-1 ids.
class NGramModel final : public LanguageModel {
 public:
  using Context = std::vector<TokenId>;
  using Continuations = std::map<TokenId, std::uint64_t>;

  NGramModel(std::size_t order, double k, std::size_t vocab_size);

  void add_sequence(std::span<const TokenId> sequence);

  std::size_t order() const noexcept { return order_; }
  double smoothing() const noexcept { return k_; }
  std::size_t vocab_size() const override { return vocab_size_; }

  const std::map<Context, Continuations>& counts() const noexcept { return counts_; }
  std::uint64_t count(std::span<const TokenId> context, TokenId next) const;
  std::uint64_t context_total(std::span<const TokenId> context) const;

  // The last n-1 ids of `history`, padded on the left.
  Context context_of(std::span<const TokenId> history) const;

 protected:
  ScoreVector score_context(std::span<const TokenId> context) const override;

 private:
  std::size_t order_;
  double k_;
  std::size_t vocab_size_;
  std::map<Context, Continuations> counts_;
  std::map<Context, std::uint64_t> totals_;
};

// Throws kEmptyCorpus for no sequences, kInvalidArgument for order 0, k <= 0
// or ids outside the vocabulary.
NGramModel ngram_train(std::span<const TokenSequence> sequences, std::size_t order,
                       double k, std::size_t vocab_size);

inline constexpr double kSuffixSmoothing = 0.01;

// Longest-suffix lookup: finds the longest suffix of `context` that occurs in
// some reference sequence followed by at least one more token, then spreads
// probability over the observed continuations with add-k smoothing. Falls
// back to uniform when no suffix of length one matches.
ScoreVector suffix_score(std::span<const TokenSequence> reference,
                         std::span<const TokenId> context, std::size_t vocab_size,
                         double k = kSuffixSmoothing);

// suffix_score over a fixed corpus, optionally also searching the context's
// own history (which is what lets it copy answers exposed earlier in the
// input).
class SuffixModel final : public LanguageModel {
 public:
  SuffixModel(std::vector<TokenSequence> reference, std::size_t vocab_size,
              bool search_context = true, double k = kSuffixSmoothing);

  std::size_t vocab_size() const override { return vocab_size_; }

 protected:
  ScoreVector score_context(std::span<const TokenId> context) const override;

 private:
  std::vector<TokenSequence> reference_;
  std::size_t vocab_size_;
  bool search_context_;
  double k_;
};

// One externally scored step: the three fields every metric needs.
struct OfflineStepScore {
  std::string item_id;
  std::size_t step_index = 0;
  double gold_logprob = 0.0;
  double max_logprob = 0.0;
  TokenId argmax_id = 0;

  bool operator==(const OfflineStepScore&) const = default;
};

// JSON Lines, one record per step. Blank lines are skipped. Throws
// kParseError with the 1-based line number, kInvalidScore when a log
// probability is positive or max_logprob < gold_logprob.
std::vector<OfflineStepScore> parse_offline_scores(std::istream& in);
std::vector<OfflineStepScore> load_offline_scores(const std::filesystem::path& path);
std::string serialize_offline_score(const OfflineStepScore& score);

}  // namespace tokext
