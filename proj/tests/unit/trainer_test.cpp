#include <gtest/gtest.h>

#include "oracle/naive_bpe.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "tokext/error.hpp"
#include "tokext/trainer.hpp"

namespace tokext {
namespace {

using support::kMarker;

std::vector<oracle::Merge> merges_of(const TokenizerModel& model) {
  std::vector<oracle::Merge> out;
  for (const auto& m : model.merges()) out.emplace_back(m.left, m.right);
  return out;
}

std::set<std::string> reserved_forms() {
  std::set<std::string> out;
  for (const auto& e : make_base_parts(default_specials()).vocab) out.insert(e.form);
  return out;
}

TEST(Trainer, WorkedExample) {
  // ▁ab x3, ▁abc x1: (▁,a) and (a,b) tie at 4; "a" sorts before the 3-byte marker.
  const std::vector<std::string> corpus{"ab ab ab abc"};
  TrainerConfig config;
  config.target_vocab_size = 259 + 4 + 3;
  const auto model = train(corpus, config);
  EXPECT_EQ(merges_of(model), (std::vector<oracle::Merge>{
                                  {"a", "b"}, {kMarker, "ab"}}));
  EXPECT_EQ(model.size(), 259u + 4u + 2u);
  EXPECT_EQ(model.entry(259).form, "a");
  EXPECT_EQ(model.entry(262).form, kMarker);
}

TEST(Trainer, StopsAtTargetSize) {
  const std::vector<std::string> corpus{"aaaa aaaa bbbb bbbb"};
  TrainerConfig config;
  config.target_vocab_size = 259 + 3 + 1;
  EXPECT_EQ(train(corpus, config).size(), config.target_vocab_size);
}

TEST(Trainer, MinPairFrequencyHonoured) {
  const std::vector<std::string> corpus{"xy xy zw"};
  TrainerConfig config;
  config.target_vocab_size = 1000;
  config.min_pair_frequency = 2;
  const auto merges = merges_of(train(corpus, config));
  for (const auto& m : merges) EXPECT_NE(m.first, "z");
  config.min_pair_frequency = 3;
  EXPECT_TRUE(merges_of(train(corpus, config)).empty());
}

TEST(Trainer, ErrorsAreTyped) {
  TrainerConfig config;
  config.target_vocab_size = 10;
  const std::vector<std::string> text{"abc"};
  try {
    (void)train(text, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
  config.target_vocab_size = 1000;
  const std::vector<std::string> blank{"   ", ""};
  try {
    (void)train(blank, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
  config.min_pair_frequency = 0;
  EXPECT_THROW((void)train(text, config), Error);
}

TEST(Trainer, NeverMergesIntoReservedForms) {
  // "<s" + ">" would collide with the <s> special.
  const std::vector<std::string> corpus{"<s> <s> <s> <s>"};
  TrainerConfig config;
  config.target_vocab_size = 400;
  config.min_pair_frequency = 1;
  const auto model = train(corpus, config);
  for (const auto& m : model.merges()) EXPECT_NE(m.left + m.right, "<s>");
}

TEST(Trainer, MatchesNaiveReferenceOnRandomCorpora) {
  support::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> corpus;
    const int lines = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int i = 0; i < lines; ++i) corpus.push_back(support::random_small_alphabet_text(rng, 60));
    TrainerConfig config;
    config.min_pair_frequency = std::uniform_int_distribution<std::uint64_t>(1, 3)(rng);
    config.verify_counts = true;
    config.target_vocab_size = 10000;
    const std::size_t floor =
        TokenizerModel::create(make_base_parts(default_specials())).size();
    // Find the minimum by asking for an impossible size first.
    config.target_vocab_size = floor;
    std::size_t minimum = floor;
    try {
      (void)train(corpus, config);
    } catch (const Error&) {
      std::set<std::string> chars;
      for (const auto& line : corpus) {
        for (const auto& w : pretokenize(line, kMarker)) {
          for (auto& c : oracle::utf8_chars(w)) chars.insert(c);
        }
      }
      minimum = floor + chars.size();
    }
    config.target_vocab_size = minimum + std::uniform_int_distribution<std::size_t>(0, 40)(rng);

    oracle::NaiveBpeConfig naive;
    naive.target_vocab_size = config.target_vocab_size;
    naive.min_pair_frequency = config.min_pair_frequency;
    naive.reserved = reserved_forms();
    ASSERT_EQ(merges_of(train(corpus, config)), oracle::naive_bpe(corpus, naive))
        << "trial " << trial;
  }
}

TEST(CountPairs, ShardingDoesNotChangeCounts) {
  support::Rng rng(8);
  std::vector<std::string> corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back(support::random_small_alphabet_text(rng, 80));
  const auto words = segment_corpus(corpus, kMarker);
  const auto serial = count_pairs(words, 1);
  for (unsigned threads : {2u, 3u, 7u, 64u}) EXPECT_EQ(count_pairs(words, threads), serial);
}

TEST(SegmentCorpus, SortedWithFrequencies) {
  const std::vector<std::string> corpus{"b a b", "a"};
  const auto words = segment_corpus(corpus, kMarker);
  ASSERT_EQ(words.size(), 2u);
  EXPECT_EQ(words[0].symbols, (std::vector<std::string>{kMarker, "a"}));
  EXPECT_EQ(words[0].frequency, 2u);
  EXPECT_EQ(words[1].frequency, 2u);
}

}  // namespace
}  // namespace tokext
