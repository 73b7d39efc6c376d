#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "deltamine/eval.hpp"
#include "deltamine/persuasion.hpp"

namespace deltamine::persuasion {

namespace {

ScoreScaler fit_scaler(const std::vector<const EncodedChain*>& chains) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto* chain : chains) {
    for (std::size_t i = 1; i < chain->comments.size(); ++i) {
      sum += chain->comments[i].karma;
      ++n;
    }
  }
  ScoreScaler s;
  if (n == 0) return s;
  s.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const auto* chain : chains) {
    for (std::size_t i = 1; i < chain->comments.size(); ++i) {
      const double d = chain->comments[i].karma - s.mean;
      var += d * d;
    }
  }
  s.stddev = std::sqrt(var / static_cast<double>(n));
  if (s.stddev < 1e-12) s.stddev = 1.0;
  return s;
}

double fold_class_weight(const std::vector<const EncodedChain*>& chains) {
  std::size_t pos = 0;
  for (const auto* c : chains) pos += c->label ? 1 : 0;
  if (pos == 0 || pos == chains.size()) return 1.0;  // degenerate fold, no reweighting
  return class_weight(chains.size() - pos, pos);
}

PersuasionModel init_model(const ModelConfig& mc, const text::EmbeddingTable* table,
                           std::uint64_t seed) {
  if (mc.kind == ModelKind::LstmFeatures) return PersuasionModel::init(mc, seed);
  if (!table) throw std::invalid_argument("train: embedding table required for this model kind");
  return PersuasionModel::init(mc, *table, seed);
}

struct FoldRun {
  PersuasionModel model;
  std::vector<EpochLog> logs;
};

FoldRun train_fold(const ModelConfig& mc, const text::EmbeddingTable* table,
                   const std::vector<const EncodedChain*>& train_set,
                   const std::vector<const EncodedChain*>& val_set, std::size_t fold_id,
                   std::uint64_t model_seed, const TrainConfig& config) {
  FoldRun run{init_model(mc, table, model_seed), {}};
  run.model.scaler = fit_scaler(train_set);
  run.model.config.lambda = config.lambda;
  const double w = fold_class_weight(train_set);

  nn::AdamConfig opt_config;
  opt_config.lr = config.lr;
  nn::Adam adam(run.model.parameters(), opt_config);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(model_seed ^ 0xA5A5A5A5A5A5A5A5ULL);

  auto mean_val_loss = [&]() {
    if (val_set.empty()) return 0.0;
    double acc = 0.0;
    for (const auto* chain : val_set) {
      ForwardResult fwd = forward_graph(run.model, *chain);
      acc += joint_loss_graph(fwd, *chain, w, config.lambda, run.model.scaler).item();
    }
    return acc / static_cast<double>(val_set.size());
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t i : order) {
      adam.zero_grad();
      ForwardResult fwd = forward_graph(run.model, *train_set[i]);
      nn::Tensor loss = joint_loss_graph(fwd, *train_set[i], w, config.lambda, run.model.scaler);
      loss_sum += loss.item();
      nn::backward(loss);
      adam.step();
    }
    run.logs.push_back({fold_id, epoch,
                        loss_sum / static_cast<double>(train_set.size()), mean_val_loss()});
  }
  return run;
}

FoldMetrics evaluate_fold(const PersuasionModel& model,
                          const std::vector<const EncodedChain*>& val_set, std::size_t fold_id) {
  std::vector<bool> predicted, labels;
  std::vector<double> probs;
  for (const auto* chain : val_set) {
    const double p = forward_chain(model, *chain).delta_probability;
    probs.push_back(p);
    predicted.push_back(p > 0.5);
    labels.push_back(chain->label);
  }
  const auto prf = eval::prf1(predicted, labels);
  FoldMetrics m;
  m.fold = fold_id;
  m.precision = prf.precision;
  m.recall = prf.recall;
  m.f1 = prf.f1;
  m.auc = eval::auc(probs, labels);
  return m;
}

}  // namespace

TrainResult train(const ModelConfig& model_config, const text::EmbeddingTable* table,
                  const std::vector<EncodedChain>& chains, const TrainConfig& config) {
  if (chains.empty()) throw std::invalid_argument("train: no chains");
  for (const auto& chain : chains) {
    if (chain.comments.size() < 2) {
      throw std::invalid_argument("train: chain '" + chain.id + "' is shorter than 2 comments");
    }
  }

  std::vector<std::size_t> order(chains.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  rng.shuffle(order);

  TrainResult result;
  const std::size_t folds = std::max<std::size_t>(config.folds, 1);
  if (folds >= 2) {
    if (chains.size() < folds) throw std::invalid_argument("train: fewer chains than folds");
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<const EncodedChain*> train_set, val_set;
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        (pos % folds == f ? val_set : train_set).push_back(&chains[order[pos]]);
      }
      const std::uint64_t fold_seed = config.seed + 0x9E3779B97F4A7C15ULL * (f + 1);
      FoldRun run = train_fold(model_config, table, train_set, val_set, f, fold_seed, config);
      result.epoch_logs.insert(result.epoch_logs.end(), run.logs.begin(), run.logs.end());
      result.fold_metrics.push_back(evaluate_fold(run.model, val_set, f));
    }
  }

  // final model on everything; with folds == 1 this is the only pass
  std::vector<const EncodedChain*> all;
  all.reserve(chains.size());
  for (std::size_t i : order) all.push_back(&chains[i]);
  FoldRun final_run = train_fold(model_config, table, all, all, folds == 1 ? 0 : folds,
                                 config.seed, config);
  result.epoch_logs.insert(result.epoch_logs.end(), final_run.logs.begin(), final_run.logs.end());
  if (folds == 1) {
    result.fold_metrics.push_back(evaluate_fold(final_run.model, all, 0));
  }
  result.model = std::move(final_run.model);
  return result;
}

}  // namespace deltamine::persuasion
