#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokext/tokenizer.hpp"

namespace tokext {

enum class Difficulty { kEasy, kHard };
enum class Unit { kToken, kCharacter, kWord, kUnclassified };

std::string_view to_string(Difficulty d) noexcept;
std::string_view to_string(Unit u) noexcept;
std::optional<Difficulty> parse_difficulty(std::string_view s) noexcept;
std::optional<Unit> parse_unit(std::string_view s) noexcept;

// A curated sentence split around its single-answer target.
struct TestSentence {
  std::string id;
  std::string prefix;
  std::string target;
  std::string suffix;

  std::string full() const { return prefix + target + suffix; }
  bool operator==(const TestSentence&) const = default;
};

struct TaskItem {
  std::string id;
  Difficulty difficulty = Difficulty::kHard;
  Unit unit = Unit::kUnclassified;
  std::string input_text;
  std::string target;

  bool operator==(const TaskItem&) const = default;
};

struct UnitClassification {
  std::size_t base_token_count = 0;
  std::size_t ext_token_count = 0;
  Unit unit = Unit::kUnclassified;
};

struct Exclusion {
  std::string id;
  std::string reason;

  bool operator==(const Exclusion&) const = default;
};

inline constexpr std::string_view kDefaultSeparator = "\n";

// Ids of `target` as they appear after `prefix`: encode(prefix + target) with
// encode(prefix) removed from the front. Throws kBoundaryMerge when
// encode(prefix) is not a literal prefix of encode(prefix + target).
TokenSequence target_ids(const TokenizerModel& model, std::string_view prefix,
                         std::string_view target);

// token: 1/1, character: base > 1 and ext = 1, word: both > 1, otherwise
// unclassified. Counts are taken in context.
UnitClassification classify_unit(const TestSentence& sentence, const TokenizerModel& base,
                                 const TokenizerModel& ext);
Unit unit_for_counts(std::size_t base_count, std::size_t ext_count) noexcept;

std::string item_id(std::string_view sentence_id, Difficulty difficulty);

struct TaskBuild {
  std::vector<TaskItem> items;
  std::vector<Exclusion> exclusions;
};

// Two items per classifiable sentence, easy then hard, in input order. The
// easy input is the full sentence, the separator, then the prefix; the hard
// input is the prefix alone. Sentences with an empty target, a duplicate id,
// a boundary merge or an unclassified unit are reported in `exclusions`.
TaskBuild build_tasks(std::span<const TestSentence> sentences, const TokenizerModel& base,
                      const TokenizerModel& ext,
                      std::string_view separator = kDefaultSeparator);

// JSON Lines readers/writers. Readers skip blank lines and throw kParseError
// with the 1-based line number.
std::vector<TestSentence> parse_test_sentences(std::istream& in);
std::vector<TaskItem> parse_task_items(std::istream& in);
std::string serialize_test_sentence(const TestSentence& sentence);
std::string serialize_task_item(const TaskItem& item);
std::string serialize_exclusion(const Exclusion& exclusion);

}  // namespace tokext
