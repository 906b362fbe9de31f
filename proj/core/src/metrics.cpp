#include "tokext/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "tokext/csv.hpp"
#include "tokext/error.hpp"

namespace tokext {
namespace {

constexpr double kOfflineAgreement = 1e-6;

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    ++n;
  }
  std::optional<double> value() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

bool target_is_empty(const TokenizerModel& tokenizer, const TaskItem& item) {
  return target_ids(tokenizer, item.input_text, item.target).empty();
}

void sort_run(EvaluationRun& run) {
  std::sort(run.evaluations.begin(), run.evaluations.end(),
            [](const ItemEvaluation& a, const ItemEvaluation& b) {
              return a.result.item_id < b.result.item_id;
            });
  std::sort(run.exclusions.begin(), run.exclusions.end(),
            [](const Exclusion& a, const Exclusion& b) { return a.id < b.id; });
}

}  // namespace

double confidence(const ScoreVector& scores) { return std::exp(scores.max_logprob()); }

std::optional<double> normalized_confidence(std::span<const double> history, double current) {
  if (history.empty()) return std::nullopt;
  const double mean = std::accumulate(history.begin(), history.end(), 0.0) /
                      static_cast<double>(history.size());
  return current / mean;
}

double cross_entropy(double gold_logprob) { return -gold_logprob; }

StepScore step_score(const ScoreVector& scores, TokenId gold) {
  return {scores.logprob(gold), scores.max_logprob(), scores.argmax()};
}

ItemEvaluation evaluate_sequence(const std::string& item_id,
                                 std::span<const TokenId> sequence,
                                 std::size_t target_start, const StepScorer& scorer) {
  ItemEvaluation eval;
  eval.result.item_id = item_id;
  std::vector<double> history;
  const std::size_t first = target_start == 0 ? 0 : 1;
  std::size_t step_index = 0;
  bool all_correct = true;
  for (std::size_t i = first; i < sequence.size(); ++i) {
    const TokenId gold = sequence[i];
    const StepScore s = scorer(step_index++, sequence.first(i), gold);
    StepRecord r;
    r.item_id = item_id;
    r.position = i + 1;
    r.gold_id = gold;
    r.argmax_id = s.argmax_id;
    r.confidence = std::exp(s.max_logprob);
    r.normalized_confidence = normalized_confidence(history, r.confidence);
    r.gold_logprob = s.gold_logprob;
    r.correct = s.argmax_id == gold;
    r.is_target_step = i >= target_start;
    history.push_back(r.confidence);
    if (r.is_target_step) {
      all_correct = all_correct && r.correct;
      eval.result.steps.push_back(r);
    }
    eval.steps.push_back(std::move(r));
  }
  eval.result.accurate = all_correct && !eval.result.steps.empty();
  return eval;
}

std::pair<TokenSequence, std::size_t> scored_sequence(const TokenizerModel& tokenizer,
                                                      const TaskItem& item) {
  TokenSequence seq = encode(tokenizer, item.input_text);
  const std::size_t target_start = seq.size();
  const TokenSequence target = target_ids(tokenizer, item.input_text, item.target);
  seq.ids.insert(seq.ids.end(), target.ids.begin(), target.ids.end());
  return {std::move(seq), target_start};
}

ItemEvaluation evaluate_item(const LanguageModel& model, const TokenizerModel& tokenizer,
                             const TaskItem& item) {
  const auto [seq, target_start] = scored_sequence(tokenizer, item);
  return evaluate_sequence(
      item.id, seq.ids, target_start,
      [&](std::size_t, std::span<const TokenId> context, TokenId gold) {
        return step_score(model.score(context), gold);
      });
}

OfflineScores::OfflineScores(std::vector<OfflineStepScore> records) {
  for (auto& r : records) {
    auto key = std::make_pair(r.item_id, r.step_index);
    if (!index_.emplace(key, std::move(r)).second) {
      throw Error(ErrorCode::kInvalidScore, "duplicate offline score for item '" + key.first +
                                                "' step " + std::to_string(key.second));
    }
  }
}

const OfflineStepScore* OfflineScores::find(const std::string& item_id,
                                            std::size_t step_index) const {
  const auto it = index_.find({item_id, step_index});
  return it == index_.end() ? nullptr : &it->second;
}

ItemEvaluation evaluate_item(const OfflineScores& scores, const TokenizerModel& tokenizer,
                             const TaskItem& item) {
  const auto [seq, target_start] = scored_sequence(tokenizer, item);
  return evaluate_sequence(
      item.id, seq.ids, target_start,
      [&](std::size_t step_index, std::span<const TokenId>, TokenId gold) {
        const OfflineStepScore* r = scores.find(item.id, step_index);
        if (r == nullptr) {
          throw Error(ErrorCode::kJoinFailure, "no offline score for item '" + item.id +
                                                   "' step " + std::to_string(step_index));
        }
        if (r->argmax_id == gold &&
            std::abs(r->max_logprob - r->gold_logprob) > kOfflineAgreement) {
          throw Error(ErrorCode::kInvalidScore,
                      "item '" + item.id + "' step " + std::to_string(step_index) +
                          ": argmax is the gold token but max_logprob != gold_logprob");
        }
        return StepScore{r->gold_logprob, r->max_logprob, r->argmax_id};
      });
}

EvaluationRun evaluate_all(const LanguageModel& model, const TokenizerModel& tokenizer,
                           std::span<const TaskItem> items, unsigned threads) {
  std::vector<std::optional<ItemEvaluation>> slots(items.size());
  std::vector<std::optional<Exclusion>> excluded(items.size());
  const auto run_one = [&](std::size_t i) {
    try {
      if (target_is_empty(tokenizer, items[i])) {
        excluded[i] = Exclusion{items[i].id, "target encodes to no tokens"};
        return;
      }
      slots[i] = evaluate_item(model, tokenizer, items[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBoundaryMerge) throw;
      excluded[i] = Exclusion{items[i].id, "boundary merge: target tokens fuse with the input"};
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, items.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) run_one(i);
  } else {
    std::vector<std::exception_ptr> failures(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < items.size(); i += workers) run_one(i);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  EvaluationRun run;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (slots[i]) run.evaluations.push_back(std::move(*slots[i]));
    if (excluded[i]) run.exclusions.push_back(std::move(*excluded[i]));
  }
  sort_run(run);
  return run;
}

EvaluationRun evaluate_all(const OfflineScores& scores, const TokenizerModel& tokenizer,
                           std::span<const TaskItem> items) {
  EvaluationRun run;
  std::vector<std::string> missing;
  for (const TaskItem& item : items) {
    try {
      if (target_is_empty(tokenizer, item)) {
        run.exclusions.push_back({item.id, "target encodes to no tokens"});
        continue;
      }
      run.evaluations.push_back(evaluate_item(scores, tokenizer, item));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kJoinFailure) {
        missing.push_back(item.id);
      } else if (e.code() == ErrorCode::kBoundaryMerge) {
        run.exclusions.push_back({item.id, "boundary merge: target tokens fuse with the input"});
      } else {
        throw;
      }
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::kJoinFailure, "offline scores missing steps for items: " + list);
  }
  sort_run(run);
  return run;
}

std::vector<TaskAggregate> aggregate(std::span<const ItemResult> results,
                                     std::span<const TaskItem> items) {
  std::unordered_map<std::string, const TaskItem*> by_id;
  for (const TaskItem& item : items) by_id.emplace(item.id, &item);

  std::vector<const ItemResult*> ordered;
  ordered.reserve(results.size());
  for (const ItemResult& r : results) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const ItemResult* a, const ItemResult* b) { return a->item_id < b->item_id; });

  struct Bucket {
    std::size_t n_items = 0;
    std::size_t accurate = 0;
    Mean norm, norm_correct, norm_incorrect, ce;
  };
  std::map<std::pair<Difficulty, Unit>, Bucket> buckets;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const ItemResult& r = *ordered[i];
    if (i > 0 && ordered[i - 1]->item_id == r.item_id) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate result for item '" + r.item_id + "'");
    }
    const auto it = by_id.find(r.item_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvalidArgument, "result '" + r.item_id + "' has no task item");
    }
    Bucket& b = buckets[{it->second->difficulty, it->second->unit}];
    ++b.n_items;
    if (r.accurate) ++b.accurate;
    for (const StepRecord& s : r.steps) {
      b.ce.add(s.cross_entropy());
      if (!s.normalized_confidence) continue;
      b.norm.add(*s.normalized_confidence);
      (s.correct ? b.norm_correct : b.norm_incorrect).add(*s.normalized_confidence);
    }
  }

  std::vector<TaskAggregate> out;
  for (const auto& [key, b] : buckets) {
    TaskAggregate a;
    a.difficulty = key.first;
    a.unit = key.second;
    a.n_items = b.n_items;
    a.accuracy = static_cast<double>(b.accurate) / static_cast<double>(b.n_items);
    a.mean_norm_conf = b.norm.value();
    a.mean_norm_conf_correct = b.norm_correct.value();
    a.mean_norm_conf_incorrect = b.norm_incorrect.value();
    a.mean_cross_entropy = b.ce.value();
    out.push_back(a);
  }
  return out;
}

std::string serialize_step_record(const StepRecord& r) {
  nlohmann::ordered_json j;
  j["item_id"] = r.item_id;
  j["position"] = r.position;
  j["gold_id"] = r.gold_id;
  j["argmax_id"] = r.argmax_id;
  j["confidence"] = r.confidence;
  if (r.normalized_confidence) j["normalized_confidence"] = *r.normalized_confidence;
  j["gold_logprob"] = r.gold_logprob;
  j["correct"] = r.correct;
  j["is_target_step"] = r.is_target_step;
  return j.dump();
}

namespace {
const csv::Row kAggregateHeader = {"difficulty",
                                   "unit",
                                   "n_items",
                                   "accuracy",
                                   "mean_norm_conf",
                                   "mean_norm_conf_correct",
                                   "mean_norm_conf_incorrect",
                                   "mean_cross_entropy"};
}  // namespace

std::string aggregates_csv(std::span<const TaskAggregate> aggregates) {
  std::string out;
  csv::append_row(out, kAggregateHeader);
  for (const TaskAggregate& a : aggregates) {
    csv::append_row(out, {std::string(to_string(a.difficulty)), std::string(to_string(a.unit)),
                          std::to_string(a.n_items), csv::format_double(a.accuracy),
                          csv::format_optional(a.mean_norm_conf),
                          csv::format_optional(a.mean_norm_conf_correct),
                          csv::format_optional(a.mean_norm_conf_incorrect),
                          csv::format_optional(a.mean_cross_entropy)});
  }
  return out;
}

std::vector<TaskAggregate> parse_aggregates_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows.front() != kAggregateHeader) {
    throw Error(ErrorCode::kParseError, "aggregates CSV: unexpected header");
  }
  std::vector<TaskAggregate> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && row[0].empty()) continue;
    const std::string where = "aggregates CSV row " + std::to_string(i + 1);
    if (row.size() != kAggregateHeader.size()) {
      throw Error(ErrorCode::kParseError, where + ": expected 8 fields");
    }
    const auto difficulty = parse_difficulty(row[0]);
    const auto unit = parse_unit(row[1]);
    if (!difficulty || !unit) throw Error(ErrorCode::kParseError, where + ": unknown task");
    TaskAggregate a;
    a.difficulty = *difficulty;
    a.unit = *unit;
    const auto n = csv::parse_double(row[2]);
    const auto accuracy = csv::parse_double(row[3]);
    if (!n || !accuracy) throw Error(ErrorCode::kParseError, where + ": missing count or accuracy");
    a.n_items = static_cast<std::size_t>(*n);
    a.accuracy = *accuracy;
    a.mean_norm_conf = csv::parse_double(row[4]);
    a.mean_norm_conf_correct = csv::parse_double(row[5]);
    a.mean_norm_conf_incorrect = csv::parse_double(row[6]);
    a.mean_cross_entropy = csv::parse_double(row[7]);
    out.push_back(a);
  }
  return out;
}

}  // namespace tokext
