#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "deltamine/checkpoint.hpp"
#include "deltamine/persuasion.hpp"

namespace deltamine::persuasion {

using json = nlohmann::json;
using nn::Checkpoint;
using nn::CheckpointEntry;
using nn::Tensor;

namespace {

void put_tensor(Checkpoint& cp, const std::string& name, const Tensor& t) {
  cp[name] = CheckpointEntry{t.shape(), t.values()};
}

Tensor get_tensor(const Checkpoint& cp, const std::string& name,
                  const std::vector<std::size_t>& shape) {
  const auto& entry = nn::require_entry(cp, name, shape);
  return Tensor::parameter(entry.shape, entry.data);
}

void put_lstm(Checkpoint& cp, const std::string& prefix, const nn::LstmCellParams& p) {
  put_tensor(cp, prefix + ".w_xi", p.w_xi);
  put_tensor(cp, prefix + ".w_hi", p.w_hi);
  put_tensor(cp, prefix + ".b_i", p.b_i);
  put_tensor(cp, prefix + ".w_xf", p.w_xf);
  put_tensor(cp, prefix + ".w_hf", p.w_hf);
  put_tensor(cp, prefix + ".b_f", p.b_f);
  put_tensor(cp, prefix + ".w_xc", p.w_xc);
  put_tensor(cp, prefix + ".w_hc", p.w_hc);
  put_tensor(cp, prefix + ".b_c", p.b_c);
  put_tensor(cp, prefix + ".w_xo", p.w_xo);
  put_tensor(cp, prefix + ".w_ho", p.w_ho);
  put_tensor(cp, prefix + ".b_o", p.b_o);
}

nn::LstmCellParams get_lstm(const Checkpoint& cp, const std::string& prefix,
                            std::size_t input_dim, std::size_t hidden_dim) {
  nn::LstmCellParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const std::vector<std::size_t> wx{hidden_dim, input_dim};
  const std::vector<std::size_t> wh{hidden_dim, hidden_dim};
  const std::vector<std::size_t> b{hidden_dim};
  p.w_xi = get_tensor(cp, prefix + ".w_xi", wx);
  p.w_hi = get_tensor(cp, prefix + ".w_hi", wh);
  p.b_i = get_tensor(cp, prefix + ".b_i", b);
  p.w_xf = get_tensor(cp, prefix + ".w_xf", wx);
  p.w_hf = get_tensor(cp, prefix + ".w_hf", wh);
  p.b_f = get_tensor(cp, prefix + ".b_f", b);
  p.w_xc = get_tensor(cp, prefix + ".w_xc", wx);
  p.w_hc = get_tensor(cp, prefix + ".w_hc", wh);
  p.b_c = get_tensor(cp, prefix + ".b_c", b);
  p.w_xo = get_tensor(cp, prefix + ".w_xo", wx);
  p.w_ho = get_tensor(cp, prefix + ".w_ho", wh);
  p.b_o = get_tensor(cp, prefix + ".b_o", b);
  return p;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

}  // namespace

void save_model(const PersuasionModel& model, const std::filesystem::path& path) {
  Checkpoint cp;
  const bool features = model.config.kind == ModelKind::LstmFeatures;
  if (!features) {
    put_tensor(cp, "embedding", model.embedding);
    put_lstm(cp, "word", model.word_lstm);
    put_lstm(cp, "sent", model.sent_lstm);
    put_lstm(cp, "op", model.op_lstm);
  }
  put_lstm(cp, "score", model.score_lstm);
  put_lstm(cp, "delta", model.delta_lstm);
  if (model.config.kind == ModelKind::HlstmAttention) {
    put_tensor(cp, "attn_w", model.attn_w);
    put_tensor(cp, "attn_b", model.attn_b);
  }
  put_tensor(cp, "score_w", model.score_w);
  put_tensor(cp, "score_b", model.score_b);
  put_tensor(cp, "delta_w", model.delta_w);
  put_tensor(cp, "delta_b", model.delta_b);
  nn::save_checkpoint(cp, path);

  json side;
  side["kind"] = to_string(model.config.kind);
  side["embedding_dim"] = model.config.embedding_dim;
  side["word_hidden"] = model.config.word_hidden;
  side["sent_hidden"] = model.config.sent_hidden;
  side["out_hidden"] = model.config.out_hidden;
  side["max_sentences"] = model.config.max_sentences;
  side["feature_dim"] = model.config.feature_dim;
  side["lambda"] = model.config.lambda;
  side["score_mean"] = model.scaler.mean;
  side["score_std"] = model.scaler.stddev;
  side["tagset_hash"] = model.tagset_hash;
  side["vocab"] = model.vocab_words;
  std::ofstream os(sidecar_path(path), std::ios::trunc);
  if (!os) throw std::runtime_error("model: cannot write sidecar for " + path.string());
  os << side.dump(2) << '\n';
}

PersuasionModel load_model(const std::filesystem::path& path) {
  std::ifstream is(sidecar_path(path));
  if (!is) throw std::runtime_error("model: missing sidecar " + sidecar_path(path).string());
  json side = json::parse(is);

  PersuasionModel m;
  m.config.kind = model_kind_from(side.at("kind").get<std::string>());
  m.config.embedding_dim = side.at("embedding_dim").get<std::size_t>();
  m.config.word_hidden = side.at("word_hidden").get<std::size_t>();
  m.config.sent_hidden = side.at("sent_hidden").get<std::size_t>();
  m.config.out_hidden = side.at("out_hidden").get<std::size_t>();
  m.config.max_sentences = side.at("max_sentences").get<std::size_t>();
  m.config.feature_dim = side.at("feature_dim").get<std::size_t>();
  m.config.lambda = side.at("lambda").get<double>();
  m.scaler.mean = side.at("score_mean").get<double>();
  m.scaler.stddev = side.at("score_std").get<double>();
  m.tagset_hash = side.at("tagset_hash").get<std::uint64_t>();
  m.vocab_words = side.at("vocab").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < m.vocab_words.size(); ++i) m.vocab.emplace(m.vocab_words[i], i);

  const Checkpoint cp = nn::load_checkpoint(path);
  const bool features = m.config.kind == ModelKind::LstmFeatures;
  if (!features) {
    m.embedding = get_tensor(cp, "embedding", {m.vocab_words.size(), m.config.embedding_dim});
    m.word_lstm = get_lstm(cp, "word", m.config.embedding_dim, m.config.word_hidden);
    m.sent_lstm = get_lstm(cp, "sent", m.config.word_hidden, m.config.sent_hidden);
    m.op_lstm = get_lstm(cp, "op", m.config.embedding_dim, m.config.out_hidden);
    m.score_lstm = get_lstm(cp, "score", m.config.sent_hidden, m.config.out_hidden);
    m.delta_lstm = get_lstm(cp, "delta", m.config.sent_hidden, m.config.out_hidden);
  } else {
    m.score_lstm = get_lstm(cp, "score", m.config.feature_dim, m.config.out_hidden);
    m.delta_lstm = get_lstm(cp, "delta", m.config.feature_dim, m.config.out_hidden);
  }
  if (m.config.kind == ModelKind::HlstmAttention) {
    m.attn_w = get_tensor(cp, "attn_w", {m.config.max_sentences, m.config.sent_hidden});
    m.attn_b = get_tensor(cp, "attn_b", {m.config.max_sentences, 1});
  }
  m.score_w = get_tensor(cp, "score_w", {m.config.out_hidden});
  m.score_b = get_tensor(cp, "score_b", {1});
  m.delta_w = get_tensor(cp, "delta_w", {m.config.out_hidden});
  m.delta_b = get_tensor(cp, "delta_b", {1});
  return m;
}

}  // namespace deltamine::persuasion
