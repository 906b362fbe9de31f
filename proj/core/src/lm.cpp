#include "tokext/lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "tokext/error.hpp"

namespace tokext {
namespace {

void check_vocab(std::size_t vocab_size) {
  if (vocab_size == 0) throw Error(ErrorCode::kInvalidArgument, "vocabulary size must be positive");
}

void check_id(TokenId id, std::size_t vocab_size) {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
    throw Error(ErrorCode::kInvalidTokenId,
                "token id " + std::to_string(id) + " outside model vocabulary of size " +
                    std::to_string(vocab_size));
  }
}

}  // namespace

double logsumexp(std::span<const double> values) noexcept {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

ScoreVector::ScoreVector(std::vector<double> logprobs) : logprobs_(std::move(logprobs)) {
  // std::max_element returns the first maximum, i.e. the lowest id.
  argmax_ = static_cast<TokenId>(
      std::max_element(logprobs_.begin(), logprobs_.end()) - logprobs_.begin());
}

ScoreVector ScoreVector::from_logits(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorCode::kInvalidArgument, "empty logit vector");
  for (double z : logits) {
    if (std::isnan(z) || z == std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::kInvalidArgument, "logits must be finite or -inf");
    }
  }
  const double normalizer = logsumexp(logits);
  if (!std::isfinite(normalizer)) {
    throw Error(ErrorCode::kInvalidArgument, "logits assign no probability mass");
  }
  std::vector<double> logprobs(logits.begin(), logits.end());
  for (double& v : logprobs) v -= normalizer;
  return ScoreVector(std::move(logprobs));
}

ScoreVector ScoreVector::uniform(std::size_t vocab_size) {
  check_vocab(vocab_size);
  return ScoreVector(
      std::vector<double>(vocab_size, -std::log(static_cast<double>(vocab_size))));
}

double ScoreVector::logprob(TokenId id) const {
  check_id(id, logprobs_.size());
  return logprobs_[static_cast<std::size_t>(id)];
}

double ScoreVector::probability(TokenId id) const { return std::exp(logprob(id)); }

double ScoreVector::log_normalizer() const noexcept { return logsumexp(logprobs_); }

ScoreVector LanguageModel::score(std::span<const TokenId> context) const {
  if (context.empty() && requires_history()) {
    throw Error(ErrorCode::kEmptyContext, "model needs at least one context token");
  }
  const std::size_t vocab = vocab_size();
  for (TokenId id : context) check_id(id, vocab);
  return score_context(context);
}

UniformModel::UniformModel(std::size_t vocab_size) : vocab_size_(vocab_size) {
  check_vocab(vocab_size);
}

ScoreVector UniformModel::score_context(std::span<const TokenId>) const {
  return ScoreVector::uniform(vocab_size_);
}

NGramModel::NGramModel(std::size_t order, double k, std::size_t vocab_size)
    : order_(order), k_(k), vocab_size_(vocab_size) {
  if (order == 0) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorCode::kInvalidArgument, "add-k constant must be positive");
  }
  check_vocab(vocab_size);
}

NGramModel::Context NGramModel::context_of(std::span<const TokenId> history) const {
  const std::size_t width = order_ - 1;
  Context ctx(width, kPadToken);
  const std::size_t take = std::min(width, history.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));
  return ctx;
}

void NGramModel::add_sequence(std::span<const TokenId> sequence) {
  for (TokenId id : sequence) check_id(id, vocab_size_);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const Context ctx = context_of(sequence.first(i));
    ++counts_[ctx][sequence[i]];
    ++totals_[ctx];
  }
}

std::uint64_t NGramModel::count(std::span<const TokenId> context, TokenId next) const {
  const auto it = counts_.find(context_of(context));
  if (it == counts_.end()) return 0;
  const auto jt = it->second.find(next);
  return jt == it->second.end() ? 0 : jt->second;
}

std::uint64_t NGramModel::context_total(std::span<const TokenId> context) const {
  const auto it = totals_.find(context_of(context));
  return it == totals_.end() ? 0 : it->second;
}

ScoreVector NGramModel::score_context(std::span<const TokenId> context) const {
  std::vector<double> logits(vocab_size_, std::log(k_));
  if (const auto it = counts_.find(context_of(context)); it != counts_.end()) {
    for (const auto& [next, c] : it->second) {
      logits[static_cast<std::size_t>(next)] = std::log(static_cast<double>(c) + k_);
    }
  }
  return ScoreVector::from_logits(logits);
}

NGramModel ngram_train(std::span<const TokenSequence> sequences, std::size_t order,
                       double k, std::size_t vocab_size) {
  if (sequences.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training sequences");
  NGramModel model(order, k, vocab_size);
  for (const auto& seq : sequences) model.add_sequence(seq.ids);
  return model;
}

namespace {

class SuffixMatcher {
 public:
  explicit SuffixMatcher(std::span<const TokenId> context) : context_(context) {}

  void scan(std::span<const TokenId> source) {
    const std::size_t n = context_.size();
    for (std::size_t end = 0; end + 1 < source.size(); ++end) {
      std::size_t m = 0;
      while (m < n && m <= end && source[end - m] == context_[n - 1 - m]) ++m;
      if (m == 0 || m < best_) continue;
      if (m > best_) {
        best_ = m;
        continuations_.clear();
      }
      ++continuations_[source[end + 1]];
    }
  }

  std::size_t best() const noexcept { return best_; }
  const std::map<TokenId, std::uint64_t>& continuations() const noexcept {
    return continuations_;
  }

 private:
  std::span<const TokenId> context_;
  std::size_t best_ = 0;
  std::map<TokenId, std::uint64_t> continuations_;
};

ScoreVector continuation_scores(const SuffixMatcher& matcher, std::size_t vocab_size,
                                double k) {
  if (matcher.best() == 0) return ScoreVector::uniform(vocab_size);
  std::vector<double> logits(vocab_size, std::log(k));
  for (const auto& [next, c] : matcher.continuations()) {
    check_id(next, vocab_size);
    logits[static_cast<std::size_t>(next)] = std::log(static_cast<double>(c) + k);
  }
  return ScoreVector::from_logits(logits);
}

}  // namespace

ScoreVector suffix_score(std::span<const TokenSequence> reference,
                         std::span<const TokenId> context, std::size_t vocab_size,
                         double k) {
  check_vocab(vocab_size);
  if (!(k > 0.0)) throw Error(ErrorCode::kInvalidArgument, "smoothing must be positive");
  SuffixMatcher matcher(context);
  for (const auto& seq : reference) matcher.scan(seq.ids);
  return continuation_scores(matcher, vocab_size, k);
}

SuffixModel::SuffixModel(std::vector<TokenSequence> reference, std::size_t vocab_size,
                         bool search_context, double k)
    : reference_(std::move(reference)),
      vocab_size_(vocab_size),
      search_context_(search_context),
      k_(k) {
  check_vocab(vocab_size);
  if (!(k > 0.0)) throw Error(ErrorCode::kInvalidArgument, "smoothing must be positive");
  for (const auto& seq : reference_) {
    for (TokenId id : seq.ids) check_id(id, vocab_size);
  }
}

ScoreVector SuffixModel::score_context(std::span<const TokenId> context) const {
  SuffixMatcher matcher(context);
  for (const auto& seq : reference_) matcher.scan(seq.ids);
  if (search_context_) matcher.scan(context);
  return continuation_scores(matcher, vocab_size_, k_);
}

std::vector<OfflineStepScore> parse_offline_scores(std::istream& in) {
  std::vector<OfflineStepScore> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto where = "offline scores line " + std::to_string(line_no);
    OfflineStepScore r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.item_id = j.at("item_id").get<std::string>();
      const auto& step = j.at("step_index");
      if (!step.is_number_integer() || step.get<long long>() < 0) {
        throw Error(ErrorCode::kParseError, where + ": step_index must be a non-negative integer");
      }
      r.step_index = step.get<std::size_t>();
      r.gold_logprob = j.at("gold_logprob").get<double>();
      r.max_logprob = j.at("max_logprob").get<double>();
      const auto& argmax = j.at("argmax_id");
      if (!argmax.is_number_integer() || argmax.get<long long>() < 0) {
        throw Error(ErrorCode::kParseError, where + ": argmax_id must be a non-negative integer");
      }
      r.argmax_id = argmax.get<TokenId>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
    if (!(r.gold_logprob <= 0.0) || !(r.max_logprob <= 0.0)) {
      throw Error(ErrorCode::kInvalidScore, where + ": log probabilities must be <= 0");
    }
    if (r.max_logprob < r.gold_logprob) {
      throw Error(ErrorCode::kInvalidScore, where + ": max_logprob < gold_logprob");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<OfflineStepScore> load_offline_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return parse_offline_scores(in);
}

std::string serialize_offline_score(const OfflineStepScore& score) {
  nlohmann::ordered_json j;
  j["item_id"] = score.item_id;
  j["step_index"] = score.step_index;
  j["gold_logprob"] = score.gold_logprob;
  j["max_logprob"] = score.max_logprob;
  j["argmax_id"] = score.argmax_id;
  return j.dump();
}

}  // namespace tokext
