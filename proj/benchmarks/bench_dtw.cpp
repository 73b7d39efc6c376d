#include <benchmark/benchmark.h>

#include "deltamine/argminer.hpp"
#include "deltamine/rng.hpp"

namespace {

std::vector<std::vector<double>> random_sequence(std::size_t len, std::size_t dim,
                                                 deltamine::Rng& rng) {
  std::vector<std::vector<double>> seq(len, std::vector<double>(dim));
  for (auto& v : seq) {
    for (auto& x : v) x = rng.uniform(-1, 1);
  }
  return seq;
}

void BM_DtwDistance(benchmark::State& state) {
  deltamine::Rng rng(1);
  const auto a = random_sequence(static_cast<std::size_t>(state.range(0)), 43 + 50, rng);
  const auto b = random_sequence(static_cast<std::size_t>(state.range(0)), 43 + 50, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(deltamine::argmine::dtw_distance(a, b));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DtwDistance)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_WmdDistance(benchmark::State& state) {
  const std::string words[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta",
                               "eta",   "theta", "iota",  "kappa", "lambda",  "mu"};
  deltamine::text::EmbeddingTable table;
  table.dim = 16;
  deltamine::Rng rng(2);
  for (const auto& w : words) {
    table.vocab.emplace(w, table.words.size());
    table.words.push_back(w);
    for (std::size_t k = 0; k < table.dim; ++k) table.vectors.push_back(rng.uniform(-1, 1));
  }
  std::vector<deltamine::text::Token> a, b;
  for (int i = 0; i < state.range(0); ++i) {
    deltamine::text::Token t;
    t.surface = words[rng.next_below(12)];
    a.push_back(t);
    t.surface = words[rng.next_below(12)];
    b.push_back(t);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(deltamine::argmine::wmd_distance(a, b, table));
  }
}
BENCHMARK(BM_WmdDistance)->RangeMultiplier(2)->Range(4, 32);

}  // namespace
