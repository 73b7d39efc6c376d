#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "deltamine/corpus.hpp"
#include "deltamine/lstm.hpp"
#include "deltamine/optim.hpp"
#include "deltamine/tensor.hpp"
#include "deltamine/textprep.hpp"

namespace deltamine::persuasion {

enum class ModelKind { HlstmAttention, HlstmPlain, LstmFeatures };

std::string to_string(ModelKind kind);
ModelKind model_kind_from(const std::string& s);

struct ModelConfig {
  ModelKind kind = ModelKind::HlstmAttention;
  std::size_t embedding_dim = 0;  // taken from the table at init
  std::size_t word_hidden = 16;
  std::size_t sent_hidden = 16;
  std::size_t out_hidden = 16;
  std::size_t max_sentences = 16;  // comments are truncated to this many sentences
  std::size_t feature_dim = 0;     // input width for LstmFeatures
  double lambda = 0.3;             // weight of the score loss against the delta loss
};

// Chains are encoded once: words resolved to embedding rows (-1 = OOV under
// the zero-vector policy), sentences truncated to max_sentences at forward
// time. comments[0] is the OP.
struct EncodedSentence {
  std::vector<long> word_ids;
};

struct EncodedComment {
  std::string id;
  std::vector<EncodedSentence> sentences;
  double karma = 0.0;
  std::vector<double> features;  // only used by LstmFeatures
};

struct EncodedChain {
  std::string id;
  std::string thread_id;
  bool label = false;
  std::vector<EncodedComment> comments;
};

EncodedChain encode_chain(const corpus::Chain& chain,
                          const text::EmbeddingTable& table);

struct ScoreScaler {
  double mean = 0.0;
  double stddev = 1.0;
  double standardize(double x) const { return (x - mean) / stddev; }
  double destandardize(double x) const { return mean + stddev * x; }

  static ScoreScaler fit(const std::vector<EncodedChain>& chains);
};

struct ChainPrediction {
  double delta_probability = 0.0;
  std::vector<double> predicted_scores;     // karma units, one per reply comment
  std::vector<double> standardized_scores;  // raw regression outputs
  std::vector<std::vector<double>> sentence_attention;  // per reply, per sentence
};

class PersuasionModel {
 public:
  ModelConfig config;
  std::vector<std::string> vocab_words;  // row order of the embedding matrix
  std::unordered_map<std::string, std::size_t> vocab;
  ScoreScaler scaler;
  std::uint64_t tagset_hash = 0;  // hash of the tagset active at train time

  nn::Tensor embedding;  // [V, embedding_dim], trained jointly with the model
  nn::LstmCellParams word_lstm, sent_lstm, op_lstm, score_lstm, delta_lstm;
  nn::Tensor attn_w;  // [max_sentences, sent_hidden]
  nn::Tensor attn_b;  // [max_sentences, 1]
  nn::Tensor score_w, score_b;  // [out_hidden], [1]
  nn::Tensor delta_w, delta_b;

  static PersuasionModel init(const ModelConfig& config, const text::EmbeddingTable& table,
                              std::uint64_t seed);
  // LstmFeatures variant; config.feature_dim must be set
  static PersuasionModel init(const ModelConfig& config, std::uint64_t seed);

  std::vector<nn::Tensor> parameters() const;
};

// Graph-producing forward pass used by training and by the value-level API.
struct ForwardResult {
  nn::Tensor delta_p;                     // [1]
  std::vector<nn::Tensor> scores;         // standardized, one per reply
  std::vector<std::vector<double>> attention;
};

// One comment through the hierarchy: word-level LSTM final states, the
// sentence-level LSTM, per-position attention, weighted sum. Returns the
// comment vector and the attention weights. Throws on a comment with no
// usable sentences.
std::pair<nn::Tensor, std::vector<double>> encode_comment(const PersuasionModel& model,
                                                          const EncodedComment& comment);

ForwardResult forward_graph(const PersuasionModel& model, const EncodedChain& chain);
ChainPrediction forward_chain(const PersuasionModel& model, const EncodedChain& chain);

// forward_chain on the chain truncated to its first k comments; requires
// 3 <= k <= chain length.
ChainPrediction predict_prefix(const PersuasionModel& model, const EncodedChain& chain,
                               std::size_t k);

// lambda * mean((s - s_hat)^2) + weighted binary cross entropy, with the
// probability clamped to [1e-7, 1-1e-7].
nn::Tensor joint_loss_graph(const ForwardResult& fwd, const EncodedChain& chain,
                            double class_weight, double lambda, const ScoreScaler& scaler);
double joint_loss(const ChainPrediction& pred, const EncodedChain& chain, double class_weight,
                  double lambda, const ScoreScaler& scaler);

// w = max(1, ln(n/p)); class_weight_raw omits the floor.
double class_weight(std::size_t n_negative, std::size_t n_positive);
double class_weight_raw(std::size_t n_negative, std::size_t n_positive);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t folds = 5;  // 1 = no cross-validation, train on everything
  double lambda = 0.3;
  double lr = 1e-3;
  std::uint64_t seed = 1;
};

struct EpochLog {
  std::size_t fold = 0;  // == folds for the final refit
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct FoldMetrics {
  std::size_t fold = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0, auc = 0.0;
};

struct TrainResult {
  PersuasionModel model;
  std::vector<EpochLog> epoch_logs;
  std::vector<FoldMetrics> fold_metrics;
};

// 5-fold cross-validation followed by a refit on all chains (folds == 1
// trains once on everything and validates on the training set). The class
// weight is recomputed from each fold's training part. Deterministic for a
// given seed.
TrainResult train(const ModelConfig& model_config, const text::EmbeddingTable* table,
                  const std::vector<EncodedChain>& chains, const TrainConfig& config);

// DMN1 checkpoint plus a JSON sidecar (<path>.json) carrying config, vocab
// and the score scaler.
void save_model(const PersuasionModel& model, const std::filesystem::path& path);
PersuasionModel load_model(const std::filesystem::path& path);

}  // namespace deltamine::persuasion
