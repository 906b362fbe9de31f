#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracle/bigram_fixture.hpp"
#include "oracle/softmax_oracle.hpp"
#include "support/corpus.hpp"
#include "tokext/error.hpp"
#include "tokext/lm.hpp"

namespace tokext {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::kIo;
}

TEST(ScoreVector, MatchesExtendedPrecisionSoftmax) {
  support::Rng rng(21);
  std::normal_distribution<double> logit(0.0, 8.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> logits(1 + trial % 40);
    for (auto& x : logits) x = logit(rng);
    const auto s = ScoreVector::from_logits(logits);
    const auto p = oracle::softmax(logits);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      EXPECT_NEAR(s.probability(static_cast<TokenId>(i)), static_cast<double>(p[i]), 1e-12);
    }
    EXPECT_NEAR(s.log_normalizer(), 0.0, 1e-12);
  }
}

TEST(ScoreVector, ArgmaxTiesGoToLowestId) {
  const std::vector<double> logits{1.0, 3.0, 3.0, -kInf};
  const auto s = ScoreVector::from_logits(logits);
  EXPECT_EQ(s.argmax(), 1);
  EXPECT_EQ(s.probability(3), 0.0);
  EXPECT_EQ(ScoreVector::uniform(5).argmax(), 0);
  EXPECT_NEAR(ScoreVector::uniform(4).max_logprob(), -std::log(4.0), 1e-15);
}

TEST(ScoreVector, RejectsDegenerateLogits) {
  const std::vector<double> empty, nan{0.0, std::nan("")}, pos{0.0, kInf}, none{-kInf, -kInf};
  for (const auto* l : {&empty, &nan, &pos, &none}) {
    EXPECT_EQ(code_of([&] { (void)ScoreVector::from_logits(*l); }), ErrorCode::kInvalidArgument);
  }
  const auto s = ScoreVector::uniform(2);
  EXPECT_THROW((void)s.logprob(2), Error);
}

TEST(Logsumexp, StableForLargeMagnitudes) {
  const std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(logsumexp(big), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> small{-1000.0, -kInf};
  EXPECT_NEAR(logsumexp(small), -1000.0, 1e-12);
}

TEST(NGram, BigramFixtureMatchesExactFractions) {
  const std::vector<TokenSequence> stream{{oracle::kFixtureStream}};
  const auto model = ngram_train(stream, 2, 1.0, oracle::kFixtureVocab);
  for (int prev = 0; prev < oracle::kFixtureVocab; ++prev) {
    const std::vector<TokenId> ctx{prev};
    const auto s = model.score(ctx);
    for (int next = 0; next < oracle::kFixtureVocab; ++next) {
      EXPECT_NEAR(s.probability(next), oracle::bigram_probability(prev, next).value(), 1e-12)
          << prev << "->" << next;
    }
  }
  // B is followed by A once in the stream.
  EXPECT_NEAR(model.score(std::vector<TokenId>{1}).probability(0), 0.5, 1e-12);
  EXPECT_NEAR(model.score(std::vector<TokenId>{1}).probability(2), 0.25, 1e-12);
  EXPECT_EQ(model.count(std::vector<TokenId>{0}, 1), 1u);
  EXPECT_EQ(model.context_total(std::vector<TokenId>{0}), 2u);
  // The first token is seen after padding.
  EXPECT_EQ(model.count(std::vector<TokenId>{}, 0), 1u);
}

TEST(NGram, UsesOnlyTheLastNMinusOneIds) {
  const std::vector<TokenSequence> data{{{0, 1, 2, 0, 1, 1}}};
  const auto model = ngram_train(data, 3, 0.5, 3);
  const std::vector<TokenId> long_ctx{2, 2, 0, 1};
  const std::vector<TokenId> short_ctx{0, 1};
  EXPECT_EQ(model.score(long_ctx).logprobs()[2], model.score(short_ctx).logprobs()[2]);
  EXPECT_EQ(model.context_of(std::vector<TokenId>{2}), (NGramModel::Context{kPadToken, 2}));
}

TEST(NGram, ValidatesArguments) {
  const std::vector<TokenSequence> data{{{0, 1}}};
  EXPECT_EQ(code_of([&] { (void)ngram_train({}, 2, 1.0, 3); }), ErrorCode::kEmptyCorpus);
  EXPECT_EQ(code_of([&] { (void)ngram_train(data, 0, 1.0, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { (void)ngram_train(data, 2, 0.0, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { (void)ngram_train(data, 2, 1.0, 1); }), ErrorCode::kInvalidTokenId);
  const auto model = ngram_train(data, 2, 1.0, 3);
  EXPECT_EQ(code_of([&] { (void)model.score(std::vector<TokenId>{7}); }),
            ErrorCode::kInvalidTokenId);
}

TEST(Suffix, PrefersLongestMatchingSuffix) {
  const std::vector<TokenSequence> ref{{{0, 1, 2}}, {{1, 3}}};
  // Suffix [0,1] continues with 2; the shorter [1] would also allow 3.
  const auto s = suffix_score(ref, std::vector<TokenId>{0, 1}, 4);
  EXPECT_EQ(s.argmax(), 2);
  EXPECT_GT(s.probability(2), 0.9);
  EXPECT_EQ(suffix_score(ref, std::vector<TokenId>{2}, 4).argmax(), 0);  // uniform
}

TEST(Suffix, SearchesOwnContext) {
  const SuffixModel model({}, 6);
  const std::vector<TokenId> ctx{4, 5, 2, 3, 4};
  EXPECT_EQ(model.score(ctx).argmax(), 5);
  const SuffixModel blind({}, 6, false);
  EXPECT_EQ(blind.score(ctx).argmax(), 0);
}

TEST(Uniform, EveryContextIsUniform) {
  const UniformModel model(10);
  EXPECT_NEAR(model.score(std::vector<TokenId>{}).max_logprob(), -std::log(10.0), 1e-15);
  EXPECT_FALSE(model.requires_history());
}

TEST(OfflineScores, ParseAndRoundTrip) {
  const OfflineStepScore rec{"s1:hard", 2, -0.5, -0.25, 7};
  std::istringstream in(serialize_offline_score(rec) + "\n\n" + serialize_offline_score(rec) +
                        "\n");
  const auto parsed = parse_offline_scores(in);
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], rec);
}

TEST(OfflineScores, ReportsLineNumbers) {
  std::istringstream in(
      R"({"item_id":"a","step_index":0,"gold_logprob":-1,"max_logprob":-0.5,"argmax_id":1})"
      "\n{broken\n");
  try {
    (void)parse_offline_scores(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  std::istringstream positive(
      R"({"item_id":"a","step_index":0,"gold_logprob":0.1,"max_logprob":0.2,"argmax_id":1})");
  EXPECT_EQ(code_of([&] { (void)parse_offline_scores(positive); }), ErrorCode::kInvalidScore);
  std::istringstream inverted(
      R"({"item_id":"a","step_index":0,"gold_logprob":-0.1,"max_logprob":-0.2,"argmax_id":1})");
  EXPECT_EQ(code_of([&] { (void)parse_offline_scores(inverted); }), ErrorCode::kInvalidScore);
  std::istringstream negative(
      R"({"item_id":"a","step_index":-1,"gold_logprob":-1,"max_logprob":-0.5,"argmax_id":1})");
  EXPECT_EQ(code_of([&] { (void)parse_offline_scores(negative); }), ErrorCode::kParseError);
}

}  // namespace
}  // namespace tokext
