#include <benchmark/benchmark.h>

#include "support/corpus.hpp"
#include "tokext/tokext.hpp"

namespace {

using namespace tokext;

TokenizerModel trained(const std::vector<std::string>& lines, std::size_t extra) {
  TrainerConfig config;
  config.target_vocab_size = make_base_parts(default_specials()).vocab.size() + extra;
  return train(lines, config);
}

const std::vector<std::string>& korean() {
  static const auto lines = support::hangul_corpus(7, 8, 60'000).lines;
  return lines;
}

const TokenizerModel& korean_model() {
  static const auto model = trained(korean(), 1500);
  return model;
}

void BM_Train(benchmark::State& state) {
  const auto lines = support::latin_corpus(1, 2, static_cast<std::size_t>(state.range(0))).lines;
  for (auto _ : state) benchmark::DoNotOptimize(trained(lines, 1000));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Train)->Arg(20'000)->Arg(80'000)->Unit(benchmark::kMillisecond);

void BM_Encode(benchmark::State& state) {
  const auto& model = korean_model();
  const auto& lines = korean();
  std::size_t bytes = 0;
  for (auto _ : state) {
    for (const auto& line : lines) {
      benchmark::DoNotOptimize(encode(model, line));
      bytes += line.size();
    }
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_Encode)->Unit(benchmark::kMillisecond);

void BM_EncodeBatch(benchmark::State& state) {
  const auto& model = korean_model();
  const auto& lines = korean();
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_batch(model, lines, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_EncodeBatch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_NGramScore(benchmark::State& state) {
  const auto& model = korean_model();
  const auto seqs = encode_batch(model, korean());
  const auto lm = ngram_train(seqs, static_cast<std::size_t>(state.range(0)), 0.1, model.size());
  const auto& context = seqs.front().ids;
  for (auto _ : state) benchmark::DoNotOptimize(lm.score(context));
}
BENCHMARK(BM_NGramScore)->Arg(2)->Arg(3);

void BM_EvaluateSuffix(benchmark::State& state) {
  const auto& model = korean_model();
  std::vector<TestSentence> sentences;
  const auto held_out = support::hangul_corpus(7, 9, 8'000).lines;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    const auto& line = held_out[i];
    const auto first = line.find(' ');
    if (first == std::string::npos) continue;
    const auto second = line.find(' ', first + 1);
    if (second == std::string::npos) continue;
    sentences.push_back({"s" + std::to_string(i), line.substr(0, first),
                         line.substr(first, second - first), line.substr(second)});
  }
  const auto tasks = build_tasks(sentences, model, model);
  const SuffixModel lm(encode_batch(model, korean()), model.size());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_all(lm, model, tasks.items));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tasks.items.size()));
}
BENCHMARK(BM_EvaluateSuffix)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
