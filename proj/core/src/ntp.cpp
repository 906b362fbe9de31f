#include "tokext/ntp.hpp"

#include <algorithm>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tokext/error.hpp"

namespace tokext {
namespace {

using ordered_json = nlohmann::ordered_json;

template <typename Record, typename Fn>
std::vector<Record> parse_jsonl(std::istream& in, std::string_view what, Fn&& convert) {
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = std::string(what) + " line " + std::to_string(line_no);
    try {
      out.push_back(convert(nlohmann::json::parse(line), where));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Difficulty d) noexcept {
  return d == Difficulty::kEasy ? "easy" : "hard";
}

std::string_view to_string(Unit u) noexcept {
  switch (u) {
    case Unit::kToken: return "token";
    case Unit::kCharacter: return "character";
    case Unit::kWord: return "word";
    case Unit::kUnclassified: return "unclassified";
  }
  return "unclassified";
}

std::optional<Difficulty> parse_difficulty(std::string_view s) noexcept {
  if (s == "easy") return Difficulty::kEasy;
  if (s == "hard") return Difficulty::kHard;
  return std::nullopt;
}

std::optional<Unit> parse_unit(std::string_view s) noexcept {
  if (s == "token") return Unit::kToken;
  if (s == "character") return Unit::kCharacter;
  if (s == "word") return Unit::kWord;
  if (s == "unclassified") return Unit::kUnclassified;
  return std::nullopt;
}

TokenSequence target_ids(const TokenizerModel& model, std::string_view prefix,
                         std::string_view target) {
  const TokenSequence head = encode(model, prefix);
  std::string joined;
  joined.reserve(prefix.size() + target.size());
  joined.append(prefix).append(target);
  const TokenSequence whole = encode(model, joined);
  if (whole.size() < head.size() ||
      !std::equal(head.ids.begin(), head.ids.end(), whole.ids.begin())) {
    throw Error(ErrorCode::kBoundaryMerge,
                "tokens of the prefix change when the target is appended");
  }
  return TokenSequence{{whole.ids.begin() + static_cast<std::ptrdiff_t>(head.size()),
                        whole.ids.end()}};
}

Unit unit_for_counts(std::size_t base_count, std::size_t ext_count) noexcept {
  if (base_count == 1 && ext_count == 1) return Unit::kToken;
  if (base_count > 1 && ext_count == 1) return Unit::kCharacter;
  if (base_count > 1 && ext_count > 1) return Unit::kWord;
  return Unit::kUnclassified;
}

UnitClassification classify_unit(const TestSentence& sentence, const TokenizerModel& base,
                                 const TokenizerModel& ext) {
  UnitClassification c;
  c.base_token_count = target_ids(base, sentence.prefix, sentence.target).size();
  c.ext_token_count = target_ids(ext, sentence.prefix, sentence.target).size();
  c.unit = unit_for_counts(c.base_token_count, c.ext_token_count);
  return c;
}

std::string item_id(std::string_view sentence_id, Difficulty difficulty) {
  std::string id(sentence_id);
  id.push_back(':');
  id.append(to_string(difficulty));
  return id;
}

TaskBuild build_tasks(std::span<const TestSentence> sentences, const TokenizerModel& base,
                      const TokenizerModel& ext, std::string_view separator) {
  TaskBuild build;
  std::unordered_set<std::string> seen;
  for (const TestSentence& s : sentences) {
    if (!seen.insert(s.id).second) {
      build.exclusions.push_back({s.id, "duplicate sentence id"});
      continue;
    }
    if (s.target.empty()) {
      build.exclusions.push_back({s.id, "empty target"});
      continue;
    }
    UnitClassification c;
    try {
      c = classify_unit(s, base, ext);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBoundaryMerge) throw;
      build.exclusions.push_back({s.id, "boundary merge: target tokens fuse with the prefix"});
      continue;
    }
    if (c.unit == Unit::kUnclassified) {
      build.exclusions.push_back(
          {s.id, "unclassified: base " + std::to_string(c.base_token_count) +
                     " token(s), extended " + std::to_string(c.ext_token_count) +
                     " token(s)"});
      continue;
    }
    std::string easy_input = s.full();
    easy_input.append(separator).append(s.prefix);
    build.items.push_back(
        {item_id(s.id, Difficulty::kEasy), Difficulty::kEasy, c.unit, std::move(easy_input),
         s.target});
    build.items.push_back(
        {item_id(s.id, Difficulty::kHard), Difficulty::kHard, c.unit, s.prefix, s.target});
  }
  return build;
}

std::vector<TestSentence> parse_test_sentences(std::istream& in) {
  return parse_jsonl<TestSentence>(in, "test sentences", [](const nlohmann::json& j,
                                                            const std::string&) {
    return TestSentence{j.at("id").get<std::string>(), j.at("prefix").get<std::string>(),
                        j.at("target").get<std::string>(),
                        j.at("suffix").get<std::string>()};
  });
}

std::vector<TaskItem> parse_task_items(std::istream& in) {
  return parse_jsonl<TaskItem>(in, "tasks", [](const nlohmann::json& j,
                                               const std::string& where) {
    TaskItem item;
    item.id = j.at("id").get<std::string>();
    const auto difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
    const auto unit = parse_unit(j.at("unit").get<std::string>());
    if (!difficulty) throw Error(ErrorCode::kParseError, where + ": unknown difficulty");
    if (!unit) throw Error(ErrorCode::kParseError, where + ": unknown unit");
    item.difficulty = *difficulty;
    item.unit = *unit;
    item.input_text = j.at("input_text").get<std::string>();
    item.target = j.at("target").get<std::string>();
    return item;
  });
}

std::string serialize_test_sentence(const TestSentence& s) {
  ordered_json j;
  j["id"] = s.id;
  j["prefix"] = s.prefix;
  j["target"] = s.target;
  j["suffix"] = s.suffix;
  return j.dump();
}

std::string serialize_task_item(const TaskItem& item) {
  ordered_json j;
  j["id"] = item.id;
  j["difficulty"] = std::string(to_string(item.difficulty));
  j["unit"] = std::string(to_string(item.unit));
  j["input_text"] = item.input_text;
  j["target"] = item.target;
  return j.dump();
}

std::string serialize_exclusion(const Exclusion& exclusion) {
  ordered_json j;
  j["id"] = exclusion.id;
  j["reason"] = exclusion.reason;
  return j.dump();
}

}  // namespace tokext
