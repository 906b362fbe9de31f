#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tokext/tokenizer.hpp"

namespace tokext {

struct TrainerConfig {
  std::size_t target_vocab_size = 0;
  std::uint64_t min_pair_frequency = 2;
  std::string marker = std::string(kDefaultMarker);
  std::vector<std::string> specials = default_specials();
  // Recount every pair from scratch after each merge and compare against the
  // incremental tables. Quadratic; meant for tests.
  bool verify_counts = false;
};

// A pretoken split into symbols, weighted by how often it occurs.
struct WeightedSymbols {
  std::vector<std::string> symbols;
  std::uint64_t frequency = 1;
};

using SymbolPair = std::pair<std::string, std::string>;
using PairCount = std::map<SymbolPair, std::uint64_t>;

// Adjacent-pair counts weighted by frequency. Sharded over `threads` workers
// with a fixed-order reduction, so the result does not depend on the count.
PairCount count_pairs(std::span<const WeightedSymbols> corpus, unsigned threads = 1);

// Pretokens of `lines` as character sequences with their frequencies, in
// ascending byte order of the pretoken.
std::vector<WeightedSymbols> segment_corpus(std::span<const std::string> lines,
                                            std::string_view marker);

// Greedy BPE: repeatedly merge the most frequent pair, ties broken by the
// smaller left form then the smaller right form (byte order, which equals
// code-point order for UTF-8). Stops at target_vocab_size or when no pair
// reaches min_pair_frequency. Pairs whose concatenation would collide with a
// special or byte form are never merged, and a pair is merged at most once
// (a later merge can recreate an operand of an earlier one).
//
// Throws kEmptyCorpus when the corpus has no pretokens and kConfigError when
// target_vocab_size < |specials| + 256 + |distinct characters|.
TokenizerModel train(std::span<const std::string> corpus, const TrainerConfig& config);

}  // namespace tokext
