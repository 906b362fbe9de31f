#include "tokext/trainer.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "tokext/error.hpp"
#include "tokext/utf8.hpp"

namespace tokext {
namespace {

using SymbolId = std::uint32_t;

constexpr std::uint64_t pair_key(SymbolId left, SymbolId right) noexcept {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}
constexpr SymbolId key_left(std::uint64_t key) noexcept {
  return static_cast<SymbolId>(key >> 32);
}
constexpr SymbolId key_right(std::uint64_t key) noexcept {
  return static_cast<SymbolId>(key & 0xFFFFFFFFu);
}

// Incremental BPE state over interned symbols.
class MergeLearner {
 public:
  MergeLearner(const std::vector<WeightedSymbols>& corpus,
               std::unordered_set<std::string> reserved)
      : reserved_(std::move(reserved)) {
    words_.reserve(corpus.size());
    for (const auto& word : corpus) {
      std::vector<SymbolId> syms;
      syms.reserve(word.symbols.size());
      for (const auto& s : word.symbols) syms.push_back(intern(s));
      words_.push_back(std::move(syms));
      freqs_.push_back(word.frequency);
    }
    for (std::uint32_t w = 0; w < words_.size(); ++w) {
      const auto& syms = words_[w];
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const auto key = pair_key(syms[i], syms[i + 1]);
        counts_[key] += freqs_[w];
        where_[key].push_back(w);
      }
    }
    for (const auto& [key, count] : counts_) push(key);
  }

  const std::string& form(SymbolId id) const { return forms_[id]; }
  std::size_t symbol_count() const noexcept { return forms_.size(); }

  // Best eligible pair, or nullopt when none remain.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> best() {
    while (!heap_.empty()) {
      const Candidate top = heap_.top();
      const auto it = counts_.find(top.key);
      if (it == counts_.end() || it->second != top.count || top.count == 0 ||
          done_.contains(top.key)) {
        heap_.pop();
        continue;
      }
      return std::make_pair(top.key, top.count);
    }
    return std::nullopt;
  }

  // Applies the merge everywhere; returns the merged symbol and whether it is
  // new.
  std::pair<SymbolId, bool> merge(std::uint64_t key) {
    const SymbolId a = key_left(key);
    const SymbolId b = key_right(key);
    const std::size_t before = forms_.size();
    const SymbolId merged = intern(forms_[a] + forms_[b]);
    const bool fresh = forms_.size() != before;
    done_.insert(key);

    ++stamp_;
    if (seen_.size() < words_.size()) seen_.resize(words_.size(), 0);
    touched_.clear();
    const std::vector<std::uint32_t> occurrences = std::move(where_[key]);
    where_.erase(key);

    for (const std::uint32_t w : occurrences) {
      if (seen_[w] == stamp_) continue;
      seen_[w] = stamp_;
      auto& syms = words_[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < syms.size() && !present; ++i) {
        present = syms[i] == a && syms[i + 1] == b;
      }
      if (!present) continue;

      const std::uint64_t f = freqs_[w];
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        adjust(pair_key(syms[i], syms[i + 1]), -static_cast<std::int64_t>(f));
      }
      std::vector<SymbolId> next;
      next.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == a && syms[i + 1] == b) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(syms[i]);
          ++i;
        }
      }
      for (std::size_t i = 0; i + 1 < next.size(); ++i) {
        const auto k = pair_key(next[i], next[i + 1]);
        adjust(k, static_cast<std::int64_t>(f));
        if (next[i] == merged || next[i + 1] == merged) where_[k].push_back(w);
      }
      syms = std::move(next);
    }

    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
    for (const auto k : touched_) {
      const auto it = counts_.find(k);
      if (it != counts_.end() && it->second == 0) {
        counts_.erase(it);
      } else {
        push(k);
      }
    }
    return {merged, fresh};
  }

  void verify() const {
    std::unordered_map<std::uint64_t, std::uint64_t> fresh;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (std::size_t i = 0; i + 1 < words_[w].size(); ++i) {
        fresh[pair_key(words_[w][i], words_[w][i + 1])] += freqs_[w];
      }
    }
    std::size_t nonzero = 0;
    for (const auto& [key, count] : counts_) {
      if (count == 0) continue;
      ++nonzero;
      const auto it = fresh.find(key);
      if (it == fresh.end() || it->second != count) {
        throw std::logic_error("incremental pair count diverged for (" +
                               forms_[key_left(key)] + ", " + forms_[key_right(key)] +
                               ")");
      }
    }
    if (nonzero != fresh.size()) {
      throw std::logic_error("incremental pair table is missing pairs");
    }
  }

 private:
  struct Candidate {
    std::uint64_t count;
    std::uint64_t key;
  };

  // Orders candidates so the top of the heap is the pair to merge next.
  struct Worse {
    const std::vector<std::string>* forms;
    bool operator()(const Candidate& x, const Candidate& y) const {
      if (x.count != y.count) return x.count < y.count;
      const auto& xl = (*forms)[key_left(x.key)];
      const auto& yl = (*forms)[key_left(y.key)];
      if (xl != yl) return xl > yl;
      return (*forms)[key_right(x.key)] > (*forms)[key_right(y.key)];
    }
  };

  SymbolId intern(const std::string& form) {
    const auto [it, inserted] =
        index_.emplace(form, static_cast<SymbolId>(forms_.size()));
    if (inserted) forms_.push_back(form);
    return it->second;
  }

  bool eligible(std::uint64_t key) const {
    if (done_.contains(key)) return false;
    const auto& l = forms_[key_left(key)];
    const auto& r = forms_[key_right(key)];
    return !reserved_.contains(l) && !reserved_.contains(r) &&
           !reserved_.contains(l + r);
  }

  void push(std::uint64_t key) {
    const auto it = counts_.find(key);
    if (it == counts_.end() || it->second == 0 || !eligible(key)) return;
    heap_.push({it->second, key});
  }

  void adjust(std::uint64_t key, std::int64_t delta) {
    auto& count = counts_[key];
    count = static_cast<std::uint64_t>(static_cast<std::int64_t>(count) + delta);
    touched_.push_back(key);
  }

  std::unordered_set<std::string> reserved_;
  std::unordered_set<std::uint64_t> done_;
  std::vector<std::string> forms_;
  std::unordered_map<std::string, SymbolId> index_;
  std::vector<std::vector<SymbolId>> words_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where_;
  std::priority_queue<Candidate, std::vector<Candidate>, Worse> heap_{Worse{&forms_}};
  std::vector<std::uint32_t> seen_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint64_t> touched_;
};

void count_range(std::span<const WeightedSymbols> corpus, PairCount& out) {
  for (const auto& word : corpus) {
    for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
      out[{word.symbols[i], word.symbols[i + 1]}] += word.frequency;
    }
  }
}

}  // namespace

PairCount count_pairs(std::span<const WeightedSymbols> corpus, unsigned threads) {
  PairCount total;
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, corpus.size()));
  if (workers == 1) {
    count_range(corpus, total);
    return total;
  }
  std::vector<PairCount> shards(workers);
  {
    const std::size_t chunk = (corpus.size() + workers - 1) / workers;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(corpus.size(), w * chunk);
      const std::size_t end = std::min(corpus.size(), begin + chunk);
      pool.emplace_back(
          [&, w, begin, end] { count_range(corpus.subspan(begin, end - begin), shards[w]); });
    }
  }
  for (const auto& shard : shards) {
    for (const auto& [pair, count] : shard) total[pair] += count;
  }
  return total;
}

std::vector<WeightedSymbols> segment_corpus(std::span<const std::string> lines,
                                            std::string_view marker) {
  std::map<std::string, std::uint64_t> frequencies;
  for (const auto& line : lines) {
    for (auto& word : pretokenize(line, marker)) ++frequencies[std::move(word)];
  }
  std::vector<WeightedSymbols> out;
  out.reserve(frequencies.size());
  for (const auto& [word, freq] : frequencies) {
    WeightedSymbols entry;
    for (std::string_view ch : utf8::split_chars(word)) entry.symbols.emplace_back(ch);
    entry.frequency = freq;
    out.push_back(std::move(entry));
  }
  return out;
}

TokenizerModel train(std::span<const std::string> corpus, const TrainerConfig& config) {
  if (config.min_pair_frequency == 0) {
    throw Error(ErrorCode::kConfigError, "min_pair_frequency must be positive");
  }
  ModelParts parts = make_base_parts(config.specials, config.marker, true);
  try {
    (void)TokenizerModel::create(parts);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }

  const auto words = segment_corpus(corpus, config.marker);
  if (words.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no text");

  std::unordered_set<std::string> reserved;
  for (const auto& e : parts.vocab) reserved.insert(e.form);

  std::set<std::string> characters;
  for (const auto& w : words) {
    for (const auto& s : w.symbols) {
      if (!reserved.contains(s)) characters.insert(s);
    }
  }
  const std::size_t minimum = parts.vocab.size() + characters.size();
  if (config.target_vocab_size < minimum) {
    throw Error(ErrorCode::kConfigError,
                "target vocabulary size " + std::to_string(config.target_vocab_size) +
                    " is below the minimum " + std::to_string(minimum) + " (" +
                    std::to_string(config.specials.size()) + " specials + 256 bytes + " +
                    std::to_string(characters.size()) + " characters)");
  }
  for (const auto& ch : characters) {
    parts.vocab.push_back(
        {ch, static_cast<TokenId>(parts.vocab.size()), TokenKind::kNormal});
  }

  MergeLearner learner(words, std::move(reserved));
  while (parts.vocab.size() < config.target_vocab_size) {
    const auto best = learner.best();
    if (!best || best->second < config.min_pair_frequency) break;
    const std::uint64_t key = best->first;
    const std::string left = learner.form(key_left(key));
    const std::string right = learner.form(key_right(key));
    const auto [merged, fresh] = learner.merge(key);
    parts.merges.push_back({left, right, parts.merges.size()});
    if (fresh) {
      parts.vocab.push_back({learner.form(merged),
                             static_cast<TokenId>(parts.vocab.size()), TokenKind::kNormal});
    }
    if (config.verify_counts) learner.verify();
  }
  return TokenizerModel::create(std::move(parts));
}

}  // namespace tokext
