#include "deltamine/persuasion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "deltamine/checkpoint.hpp"

namespace deltamine::persuasion {

using json = nlohmann::json;
using nn::Tensor;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::HlstmAttention: return "hlstm-att";
    case ModelKind::HlstmPlain: return "hlstm";
    case ModelKind::LstmFeatures: return "lstm-f";
  }
  return "hlstm-att";
}

ModelKind model_kind_from(const std::string& s) {
  if (s == "hlstm-att") return ModelKind::HlstmAttention;
  if (s == "hlstm") return ModelKind::HlstmPlain;
  if (s == "lstm-f") return ModelKind::LstmFeatures;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

EncodedChain encode_chain(const corpus::Chain& chain, const text::EmbeddingTable& table) {
  EncodedChain out;
  out.id = chain.id();
  out.thread_id = chain.thread_id;
  out.label = chain.label;
  for (const auto& comment : chain.comments) {
    EncodedComment ec;
    ec.id = comment.id;
    ec.karma = static_cast<double>(comment.karma);
    const std::u32string body = text::utf8_decode(comment.body);
    for (const auto& span : text::split_sentences(body)) {
      auto tokens = text::tokenize(body.substr(span.begin, span.end - span.begin), span.begin);
      if (tokens.empty()) continue;
      EncodedSentence es;
      es.word_ids.reserve(tokens.size());
      for (const auto& tok : tokens) {
        if (auto idx = table.lookup(tok.surface)) {
          es.word_ids.push_back(static_cast<long>(*idx));
        } else if (table.oov_policy == text::OovPolicy::HashedBucket && !table.words.empty()) {
          // resolve the bucket now so the model never needs the policy
          std::uint64_t h = 0xCBF29CE484222325ULL;
          for (char ch : tok.surface) {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001B3ULL;
          }
          es.word_ids.push_back(static_cast<long>(h % table.words.size()));
        } else {
          es.word_ids.push_back(-1);
        }
      }
      ec.sentences.push_back(std::move(es));
    }
    out.comments.push_back(std::move(ec));
  }
  return out;
}

ScoreScaler ScoreScaler::fit(const std::vector<EncodedChain>& chains) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& chain : chains) {
    for (std::size_t i = 1; i < chain.comments.size(); ++i) {
      sum += chain.comments[i].karma;
      ++n;
    }
  }
  ScoreScaler s;
  if (n == 0) return s;
  s.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const auto& chain : chains) {
    for (std::size_t i = 1; i < chain.comments.size(); ++i) {
      const double d = chain.comments[i].karma - s.mean;
      var += d * d;
    }
  }
  s.stddev = std::sqrt(var / static_cast<double>(n));
  if (s.stddev < 1e-12) s.stddev = 1.0;
  return s;
}

PersuasionModel PersuasionModel::init(const ModelConfig& config,
                                      const text::EmbeddingTable& table, std::uint64_t seed) {
  if (config.kind == ModelKind::LstmFeatures) {
    throw std::invalid_argument("init: LstmFeatures takes no embedding table");
  }
  PersuasionModel m;
  m.config = config;
  m.config.embedding_dim = table.dim;
  m.vocab_words = table.words;
  m.vocab = table.vocab;
  m.embedding = Tensor::parameter({table.words.size(), table.dim},
                                  std::vector<double>(table.vectors));
  Rng rng(seed);
  m.word_lstm = nn::LstmCellParams::init(table.dim, config.word_hidden, rng);
  m.sent_lstm = nn::LstmCellParams::init(config.word_hidden, config.sent_hidden, rng);
  m.op_lstm = nn::LstmCellParams::init(table.dim, config.out_hidden, rng);
  m.score_lstm = nn::LstmCellParams::init(config.sent_hidden, config.out_hidden, rng);
  m.delta_lstm = nn::LstmCellParams::init(config.sent_hidden, config.out_hidden, rng);

  const double bound = std::sqrt(1.0 / static_cast<double>(config.sent_hidden));
  std::vector<double> aw(config.max_sentences * config.sent_hidden);
  for (auto& x : aw) x = rng.uniform(-bound, bound);
  m.attn_w = Tensor::parameter({config.max_sentences, config.sent_hidden}, std::move(aw));
  m.attn_b = Tensor::parameter({config.max_sentences, 1},
                               std::vector<double>(config.max_sentences, 0.0));

  const double hbound = std::sqrt(1.0 / static_cast<double>(config.out_hidden));
  std::vector<double> sw(config.out_hidden), dw(config.out_hidden);
  for (auto& x : sw) x = rng.uniform(-hbound, hbound);
  for (auto& x : dw) x = rng.uniform(-hbound, hbound);
  m.score_w = Tensor::parameter({config.out_hidden}, std::move(sw));
  m.score_b = Tensor::parameter({1}, {0.0});
  m.delta_w = Tensor::parameter({config.out_hidden}, std::move(dw));
  m.delta_b = Tensor::parameter({1}, {0.0});
  return m;
}

PersuasionModel PersuasionModel::init(const ModelConfig& config, std::uint64_t seed) {
  if (config.kind != ModelKind::LstmFeatures) {
    throw std::invalid_argument("init: this overload is for LstmFeatures");
  }
  if (config.feature_dim == 0) throw std::invalid_argument("init: feature_dim not set");
  PersuasionModel m;
  m.config = config;
  Rng rng(seed);
  m.score_lstm = nn::LstmCellParams::init(config.feature_dim, config.out_hidden, rng);
  m.delta_lstm = nn::LstmCellParams::init(config.feature_dim, config.out_hidden, rng);
  const double hbound = std::sqrt(1.0 / static_cast<double>(config.out_hidden));
  std::vector<double> sw(config.out_hidden), dw(config.out_hidden);
  for (auto& x : sw) x = rng.uniform(-hbound, hbound);
  for (auto& x : dw) x = rng.uniform(-hbound, hbound);
  m.score_w = Tensor::parameter({config.out_hidden}, std::move(sw));
  m.score_b = Tensor::parameter({1}, {0.0});
  m.delta_w = Tensor::parameter({config.out_hidden}, std::move(dw));
  m.delta_b = Tensor::parameter({1}, {0.0});
  return m;
}

std::vector<Tensor> PersuasionModel::parameters() const {
  std::vector<Tensor> params;
  auto append = [&](const std::vector<Tensor>& ts) {
    params.insert(params.end(), ts.begin(), ts.end());
  };
  if (config.kind != ModelKind::LstmFeatures) {
    params.push_back(embedding);
    append(word_lstm.tensors());
    append(sent_lstm.tensors());
    append(op_lstm.tensors());
  }
  append(score_lstm.tensors());
  append(delta_lstm.tensors());
  if (config.kind == ModelKind::HlstmAttention) {
    params.push_back(attn_w);
    params.push_back(attn_b);
  }
  params.push_back(score_w);
  params.push_back(score_b);
  params.push_back(delta_w);
  params.push_back(delta_b);
  return params;
}

namespace {

Tensor word_vector(const PersuasionModel& model, long id, const Tensor& oov_zero) {
  if (id < 0) return oov_zero;
  return nn::row(model.embedding, static_cast<std::size_t>(id));
}

// word-level LSTM final hidden state per sentence
std::vector<Tensor> sentence_vectors(const PersuasionModel& model,
                                     const EncodedComment& comment, const Tensor& oov_zero) {
  std::vector<Tensor> out;
  const std::size_t limit = std::min(comment.sentences.size(), model.config.max_sentences);
  for (std::size_t j = 0; j < limit; ++j) {
    const auto& sent = comment.sentences[j];
    if (sent.word_ids.empty()) continue;
    auto state = nn::lstm_zero_state(model.config.word_hidden);
    for (long id : sent.word_ids) {
      state = nn::lstm_cell_step(model.word_lstm, word_vector(model, id, oov_zero), state);
    }
    out.push_back(state.h);
  }
  return out;
}

struct CommentEncoding {
  Tensor vector;
  std::vector<double> attention;
};

CommentEncoding encode_comment_impl(const PersuasionModel& model,
                                    const EncodedComment& comment, const Tensor& oov_zero) {
  std::vector<Tensor> sent_vecs = sentence_vectors(model, comment, oov_zero);
  if (sent_vecs.empty()) {
    throw std::invalid_argument("encode_comment: comment '" + comment.id + "' has no sentences");
  }
  // sentence-level LSTM outputs
  auto states = nn::lstm_run(model.sent_lstm, sent_vecs, nn::lstm_zero_state(model.config.sent_hidden));

  CommentEncoding enc;
  if (model.config.kind == ModelKind::HlstmPlain) {
    enc.vector = states.back().h;
    return enc;
  }
  // per-position attention, weighted sum over real positions
  Tensor acc;
  for (std::size_t i = 0; i < states.size(); ++i) {
    Tensor pre = nn::tanh(nn::add(nn::dot(nn::row(model.attn_w, i), states[i].h),
                                  nn::row(model.attn_b, i)));
    Tensor weight = nn::sigmoid(pre);
    enc.attention.push_back(weight.item());
    Tensor term = nn::smul(states[i].h, weight);
    acc = i == 0 ? term : nn::add(acc, term);
  }
  enc.vector = acc;
  return enc;
}

Tensor feature_input(const EncodedComment& comment, std::size_t dim) {
  if (comment.features.size() != dim) {
    throw std::invalid_argument("forward: comment '" + comment.id + "' has " +
                                std::to_string(comment.features.size()) +
                                " features, model expects " + std::to_string(dim));
  }
  return Tensor::constant({dim}, comment.features);
}

}  // namespace

std::pair<Tensor, std::vector<double>> encode_comment(const PersuasionModel& model,
                                                      const EncodedComment& comment) {
  if (model.config.kind == ModelKind::LstmFeatures) {
    throw std::invalid_argument("encode_comment: the feature variant has no comment encoder");
  }
  Tensor oov_zero = Tensor::zeros({model.config.embedding_dim});
  auto enc = encode_comment_impl(model, comment, oov_zero);
  return {enc.vector, enc.attention};
}

ForwardResult forward_graph(const PersuasionModel& model, const EncodedChain& chain) {
  if (chain.comments.size() < 2) {
    throw std::invalid_argument("forward: chain '" + chain.id + "' needs the OP and >= 1 reply");
  }
  ForwardResult result;

  std::vector<Tensor> inputs;
  nn::LstmState score_init = nn::lstm_zero_state(model.config.out_hidden);
  nn::LstmState delta_init = nn::lstm_zero_state(model.config.out_hidden);
  std::size_t first_scored = 0;

  if (model.config.kind == ModelKind::LstmFeatures) {
    // the OP is part of the input sequence; scores start at the first reply
    for (const auto& comment : chain.comments) {
      inputs.push_back(feature_input(comment, model.config.feature_dim));
    }
    first_scored = 1;
  } else {
    Tensor oov_zero = Tensor::zeros({model.config.embedding_dim});
    // OP encoder over the flat word sequence; its final hidden state becomes
    // the initial cell state of both output layers
    auto op_state = nn::lstm_zero_state(model.config.out_hidden);
    bool op_has_words = false;
    for (const auto& sent : chain.comments[0].sentences) {
      for (long id : sent.word_ids) {
        op_state = nn::lstm_cell_step(model.op_lstm, word_vector(model, id, oov_zero), op_state);
        op_has_words = true;
      }
    }
    if (op_has_words) {
      score_init.c = op_state.h;
      delta_init.c = op_state.h;
    }
    for (std::size_t i = 1; i < chain.comments.size(); ++i) {
      auto enc = encode_comment_impl(model, chain.comments[i], oov_zero);
      inputs.push_back(enc.vector);
      if (model.config.kind == ModelKind::HlstmAttention) {
        result.attention.push_back(std::move(enc.attention));
      }
    }
  }

  auto score_states = nn::lstm_run(model.score_lstm, inputs, score_init);
  auto delta_states = nn::lstm_run(model.delta_lstm, inputs, delta_init);
  for (std::size_t t = first_scored; t < score_states.size(); ++t) {
    result.scores.push_back(nn::add(nn::dot(model.score_w, score_states[t].h), model.score_b));
  }
  result.delta_p = nn::sigmoid(nn::add(nn::dot(model.delta_w, delta_states.back().h),
                                       model.delta_b));
  return result;
}

ChainPrediction forward_chain(const PersuasionModel& model, const EncodedChain& chain) {
  ForwardResult fwd = forward_graph(model, chain);
  ChainPrediction pred;
  pred.delta_probability = fwd.delta_p.item();
  for (const auto& s : fwd.scores) {
    pred.standardized_scores.push_back(s.item());
    pred.predicted_scores.push_back(model.scaler.destandardize(s.item()));
  }
  pred.sentence_attention = fwd.attention;
  return pred;
}

ChainPrediction predict_prefix(const PersuasionModel& model, const EncodedChain& chain,
                               std::size_t k) {
  if (k < 3 || k > chain.comments.size()) {
    throw std::invalid_argument("predict_prefix: k must be in [3, chain length]");
  }
  EncodedChain prefix;
  prefix.id = chain.id;
  prefix.thread_id = chain.thread_id;
  prefix.label = chain.label;
  prefix.comments.assign(chain.comments.begin(),
                         chain.comments.begin() + static_cast<std::ptrdiff_t>(k));
  return forward_chain(model, prefix);
}

nn::Tensor joint_loss_graph(const ForwardResult& fwd, const EncodedChain& chain,
                            double class_weight, double lambda, const ScoreScaler& scaler) {
  Tensor l2 = nn::binary_cross_entropy(fwd.delta_p, chain.label ? 1.0 : 0.0, class_weight);
  if (fwd.scores.empty() || lambda == 0.0) return l2;
  Tensor sq_sum;
  for (std::size_t i = 0; i < fwd.scores.size(); ++i) {
    const double target = scaler.standardize(chain.comments[i + 1].karma);
    Tensor diff = nn::sub(fwd.scores[i], Tensor::scalar(target));
    Tensor sq = nn::mul(diff, diff);
    sq_sum = i == 0 ? sq : nn::add(sq_sum, sq);
  }
  Tensor l1 = nn::scale(sq_sum, 1.0 / static_cast<double>(fwd.scores.size()));
  return nn::add(nn::scale(l1, lambda), l2);
}

double joint_loss(const ChainPrediction& pred, const EncodedChain& chain, double class_weight,
                  double lambda, const ScoreScaler& scaler) {
  constexpr double kEps = 1e-7;
  const double p = std::clamp(pred.delta_probability, kEps, 1.0 - kEps);
  const double y = chain.label ? 1.0 : 0.0;
  const double l2 = -(class_weight * y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  double l1 = 0.0;
  if (!pred.standardized_scores.empty()) {
    for (std::size_t i = 0; i < pred.standardized_scores.size(); ++i) {
      const double d = pred.standardized_scores[i] - scaler.standardize(chain.comments[i + 1].karma);
      l1 += d * d;
    }
    l1 /= static_cast<double>(pred.standardized_scores.size());
  }
  return lambda * l1 + l2;
}

double class_weight_raw(std::size_t n_negative, std::size_t n_positive) {
  if (n_positive == 0) throw std::invalid_argument("class_weight: no positive samples");
  return std::log(static_cast<double>(n_negative) / static_cast<double>(n_positive));
}

double class_weight(std::size_t n_negative, std::size_t n_positive) {
  return std::max(1.0, class_weight_raw(n_negative, n_positive));
}

}  // namespace deltamine::persuasion
