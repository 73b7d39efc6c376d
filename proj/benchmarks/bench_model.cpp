#include <benchmark/benchmark.h>

#include "deltamine/persuasion.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace deltamine;

struct BenchSetup {
  std::vector<persuasion::EncodedChain> encoded;
  persuasion::PersuasionModel model;
};

BenchSetup make_bench_setup(std::size_t hidden) {
  fixtures::MarkerCorpusConfig cfg;
  cfg.chains = 8;
  cfg.seed = 3;
  auto chains = fixtures::make_marker_chains(cfg);
  auto table = fixtures::make_random_table(chains, 16, 4);
  persuasion::ModelConfig mc;
  mc.word_hidden = hidden;
  mc.sent_hidden = hidden;
  mc.out_hidden = hidden;
  BenchSetup s{fixtures::encode_all(chains, table),
               persuasion::PersuasionModel::init(mc, table, 5)};
  return s;
}

void BM_ForwardChain(benchmark::State& state) {
  auto s = make_bench_setup(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(persuasion::forward_chain(s.model, s.encoded[i % s.encoded.size()]));
    ++i;
  }
}
BENCHMARK(BM_ForwardChain)->Arg(8)->Arg(16)->Arg(32);

void BM_TrainStep(benchmark::State& state) {
  auto s = make_bench_setup(static_cast<std::size_t>(state.range(0)));
  s.model.scaler = persuasion::ScoreScaler::fit(s.encoded);
  nn::Adam adam(s.model.parameters(), {});
  std::size_t i = 0;
  for (auto _ : state) {
    adam.zero_grad();
    auto fwd = persuasion::forward_graph(s.model, s.encoded[i % s.encoded.size()]);
    auto loss = persuasion::joint_loss_graph(fwd, s.encoded[i % s.encoded.size()], 1.0, 0.3,
                                             s.model.scaler);
    nn::backward(loss);
    adam.step();
    ++i;
  }
}
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(16);

}  // namespace
