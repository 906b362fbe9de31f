#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tokext/lm.hpp"
#include "tokext/ntp.hpp"
#include "tokext/tokenizer.hpp"

namespace tokext {

// Maximum softmax probability of the step.
double confidence(const ScoreVector& scores);

// current / mean(history); nullopt for an empty history (the first scored
// position has no normalized value).
std::optional<double> normalized_confidence(std::span<const double> history, double current);

// Negative log-probability of the gold token, in nats.
double cross_entropy(double gold_logprob);

// What a scorer reports for one step; enough for every metric.
struct StepScore {
  double gold_logprob = 0.0;
  double max_logprob = 0.0;
  TokenId argmax_id = 0;
};

StepScore step_score(const ScoreVector& scores, TokenId gold);

struct StepRecord {
  std::string item_id;
  std::size_t position = 0;  // 1-based within the scored sequence
  TokenId gold_id = 0;
  TokenId argmax_id = 0;
  double confidence = 0.0;
  std::optional<double> normalized_confidence;
  double gold_logprob = 0.0;
  bool correct = false;
  bool is_target_step = false;

  double cross_entropy() const noexcept { return -gold_logprob; }
  bool operator==(const StepRecord&) const = default;
};

struct ItemResult {
  std::string item_id;
  std::vector<StepRecord> steps;  // target steps only
  bool accurate = false;
};

struct ItemEvaluation {
  ItemResult result;
  std::vector<StepRecord> steps;  // every scored position
};

// Scorer for step `step_index` (0-based count of scored positions) predicting
// `gold` from `context`.
using StepScorer =
    std::function<StepScore(std::size_t step_index, std::span<const TokenId> context,
                            TokenId gold)>;

// Teacher-forced scoring of `sequence`, whose target begins at index
// `target_start`. Positions 2..L are scored, plus position 1 when it is
// already a target token; normalized confidence at each position divides by
// the mean confidence of every earlier scored position of the item.
ItemEvaluation evaluate_sequence(const std::string& item_id,
                                 std::span<const TokenId> sequence,
                                 std::size_t target_start, const StepScorer& scorer);

// The scored sequence is encode(input_text) followed by
// target_ids(input_text, target). Throws kBoundaryMerge.
std::pair<TokenSequence, std::size_t> scored_sequence(const TokenizerModel& tokenizer,
                                                      const TaskItem& item);

ItemEvaluation evaluate_item(const LanguageModel& model, const TokenizerModel& tokenizer,
                             const TaskItem& item);

// Externally computed step scores keyed by (item_id, step_index).
class OfflineScores {
 public:
  explicit OfflineScores(std::vector<OfflineStepScore> records);

  const OfflineStepScore* find(const std::string& item_id, std::size_t step_index) const;
  std::size_t size() const noexcept { return index_.size(); }

 private:
  std::map<std::pair<std::string, std::size_t>, OfflineStepScore> index_;
};

// Throws kJoinFailure naming the first missing step, kInvalidScore when a
// record claims argmax == gold but its two log-probabilities disagree.
ItemEvaluation evaluate_item(const OfflineScores& scores, const TokenizerModel& tokenizer,
                             const TaskItem& item);

struct EvaluationRun {
  std::vector<ItemEvaluation> evaluations;  // sorted by item id
  std::vector<Exclusion> exclusions;         // boundary merges, sorted by id
};

EvaluationRun evaluate_all(const LanguageModel& model, const TokenizerModel& tokenizer,
                           std::span<const TaskItem> items, unsigned threads = 1);

// Collects every unjoined item before throwing kJoinFailure with their ids.
EvaluationRun evaluate_all(const OfflineScores& scores, const TokenizerModel& tokenizer,
                           std::span<const TaskItem> items);

struct TaskAggregate {
  Difficulty difficulty = Difficulty::kEasy;
  Unit unit = Unit::kToken;
  std::size_t n_items = 0;
  double accuracy = 0.0;
  std::optional<double> mean_norm_conf;
  std::optional<double> mean_norm_conf_correct;
  std::optional<double> mean_norm_conf_incorrect;
  std::optional<double> mean_cross_entropy;

  bool operator==(const TaskAggregate&) const = default;
};

// One aggregate per (difficulty, unit) present, in easy/hard then
// token/character/word order. Means pool target steps over every item of the
// task; a mean over an empty set is absent. Results are folded in id order,
// so the output does not depend on input order. Throws kInvalidArgument
// when a result has no matching item.
std::vector<TaskAggregate> aggregate(std::span<const ItemResult> results,
                                     std::span<const TaskItem> items);

std::string serialize_step_record(const StepRecord& record);
std::string aggregates_csv(std::span<const TaskAggregate> aggregates);
std::vector<TaskAggregate> parse_aggregates_csv(std::string_view text);

}  // namespace tokext
