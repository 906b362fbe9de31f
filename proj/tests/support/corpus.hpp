#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tokext::support {

using Rng = std::mt19937_64;

// Code point drawn from a mix of ASCII, Latin-1, Greek, Cyrillic, Hangul,
// CJK and supplementary-plane ranges. Never whitespace or U+2581.
char32_t random_code_point(Rng& rng);

// Words of random code points joined by single spaces, with no leading or
// trailing space. May be empty.
std::u32string random_text(Rng& rng, std::size_t max_words, std::size_t max_word_len);

// Words over a small alphabet, so pair counts collide and ties are frequent.
std::string random_small_alphabet_text(Rng& rng, std::size_t max_chars);

struct SyntheticCorpus {
  std::vector<std::string> lines;
  std::size_t bytes = 0;
};

// Zipf-distributed sentences over a seeded pseudo-word lexicon. Two calls with
// the same `lexicon_seed` share a lexicon; `sentence_seed` selects the text.
SyntheticCorpus hangul_corpus(std::uint64_t lexicon_seed, std::uint64_t sentence_seed,
                              std::size_t min_bytes);
SyntheticCorpus latin_corpus(std::uint64_t lexicon_seed, std::uint64_t sentence_seed,
                             std::size_t min_bytes);

}  // namespace tokext::support
