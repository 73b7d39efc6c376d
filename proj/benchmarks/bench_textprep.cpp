#include <benchmark/benchmark.h>

#include "deltamine/textprep.hpp"

namespace {

const char* kSample =
    "I think that the housing market was destined to stall. Prices doubled, so families cut "
    "spending. Mr. Smith disagreed because wages kept rising in his district. In my opinion, "
    "the data says otherwise. What happens next?";

void BM_SplitSentences(benchmark::State& state) {
  const auto text = deltamine::text::utf8_decode(kSample);
  for (auto _ : state) {
    benchmark::DoNotOptimize(deltamine::text::split_sentences(text));
  }
}
BENCHMARK(BM_SplitSentences);

void BM_Tokenize(benchmark::State& state) {
  const auto text = deltamine::text::utf8_decode(kSample);
  for (auto _ : state) {
    benchmark::DoNotOptimize(deltamine::text::tokenize(text, 0));
  }
}
BENCHMARK(BM_Tokenize);

void BM_AnalyzeComment(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        deltamine::text::analyze_comment("c", kSample, 0, false, nullptr));
  }
}
BENCHMARK(BM_AnalyzeComment);

}  // namespace
