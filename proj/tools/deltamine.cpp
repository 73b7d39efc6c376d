// deltamine: persuasion detection and argument mining over threaded
// discussions. One subcommand per pipeline stage; every run writes its
// outputs plus a manifest under the output directory.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltamine/argminer.hpp"
#include "deltamine/corpus.hpp"
#include "deltamine/eval.hpp"
#include "deltamine/features.hpp"
#include "deltamine/persuasion.hpp"
#include "deltamine/textprep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace deltamine;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// All tunables of a run in one struct; a key=value config file fills it
// first, command-line flags override.
struct RunConfig {
  std::string corpus, embeddings, annotations, checkpoint, components, predictions;
  std::string tagger_sample, lexicon;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string model = "hlstm-att";
  std::string metric = "dtw";
  std::size_t n_uni = 7, n_bi = 3;
  std::size_t dim = 50, epochs = 25, window = 5, negatives = 5;
  double lr = 1e-3, lambda = 0.3;
  std::size_t folds = 5, train_epochs = 50;
  std::size_t word_hidden = 16, sent_hidden = 16, out_hidden = 16, max_sentences = 16;
  std::size_t min_len = 3, max_len = 11;
  std::string prefix_k;  // "3..8"
  std::string report = "detect";
  std::string caps = "0,1,2,3,5,7,10,15";
  std::size_t jobs = 1;
  double theta = 0.5;

  std::string serialized() const {
    std::ostringstream os;
    os << "annotations=" << annotations << '\n'
       << "caps=" << caps << '\n'
       << "checkpoint=" << checkpoint << '\n'
       << "components=" << components << '\n'
       << "corpus=" << corpus << '\n'
       << "dim=" << dim << '\n'
       << "embeddings=" << embeddings << '\n'
       << "epochs=" << epochs << '\n'
       << "folds=" << folds << '\n'
       << "jobs=" << jobs << '\n'
       << "lambda=" << fmt_exact(lambda) << '\n'
       << "lexicon=" << lexicon << '\n'
       << "lr=" << fmt_exact(lr) << '\n'
       << "max_len=" << max_len << '\n'
       << "max_sentences=" << max_sentences << '\n'
       << "metric=" << metric << '\n'
       << "min_len=" << min_len << '\n'
       << "model=" << model << '\n'
       << "n_bi=" << n_bi << '\n'
       << "n_uni=" << n_uni << '\n'
       << "negatives=" << negatives << '\n'
       << "out_hidden=" << out_hidden << '\n'
       << "predictions=" << predictions << '\n'
       << "prefix_k=" << prefix_k << '\n'
       << "report=" << report << '\n'
       << "seed=" << (seed ? std::to_string(*seed) : "") << '\n'
       << "sent_hidden=" << sent_hidden << '\n'
       << "tagger_sample=" << tagger_sample << '\n'
       << "theta=" << fmt_exact(theta) << '\n'
       << "train_epochs=" << train_epochs << '\n'
       << "window=" << window << '\n'
       << "word_hidden=" << word_hidden << '\n';
    return os.str();
  }
};

void load_config_file(const fs::path& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected key = value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto set_num = [&](std::size_t& field) { field = std::stoull(value); };
    if (key == "corpus") cfg.corpus = value;
    else if (key == "embeddings") cfg.embeddings = value;
    else if (key == "annotations") cfg.annotations = value;
    else if (key == "checkpoint") cfg.checkpoint = value;
    else if (key == "components") cfg.components = value;
    else if (key == "predictions") cfg.predictions = value;
    else if (key == "tagger_sample") cfg.tagger_sample = value;
    else if (key == "lexicon") cfg.lexicon = value;
    else if (key == "out") cfg.out = value;
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "model") cfg.model = value;
    else if (key == "metric") cfg.metric = value;
    else if (key == "n_uni") set_num(cfg.n_uni);
    else if (key == "n_bi") set_num(cfg.n_bi);
    else if (key == "dim") set_num(cfg.dim);
    else if (key == "epochs") set_num(cfg.epochs);
    else if (key == "window") set_num(cfg.window);
    else if (key == "negatives") set_num(cfg.negatives);
    else if (key == "lr") cfg.lr = std::stod(value);
    else if (key == "lambda") cfg.lambda = std::stod(value);
    else if (key == "folds") set_num(cfg.folds);
    else if (key == "train_epochs") set_num(cfg.train_epochs);
    else if (key == "word_hidden") set_num(cfg.word_hidden);
    else if (key == "sent_hidden") set_num(cfg.sent_hidden);
    else if (key == "out_hidden") set_num(cfg.out_hidden);
    else if (key == "max_sentences") set_num(cfg.max_sentences);
    else if (key == "min_len") set_num(cfg.min_len);
    else if (key == "max_len") set_num(cfg.max_len);
    else if (key == "prefix_k") cfg.prefix_k = value;
    else if (key == "report") cfg.report = value;
    else if (key == "caps") cfg.caps = value;
    else if (key == "jobs") set_num(cfg.jobs);
    else if (key == "theta") cfg.theta = std::stod(value);
    else throw std::runtime_error("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
  }
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw std::runtime_error("missing required input: " + what);
  if (!fs::exists(path)) throw std::runtime_error(what + " not found: " + path);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_manifest(const RunConfig& cfg, const std::string& subcommand) {
  json m;
  m["tool"] = "deltamine";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["config_hash"] = fnv1a(subcommand + "\n" + cfg.serialized());
  m["seed"] = cfg.seed ? *cfg.seed : 0;
  m["stopword_hash"] = text::stopword_list_hash();
  m["timestamp"] = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  auto os = open_out(fs::path(cfg.out) / "manifest.json");
  os << m.dump(2) << '\n';
}

std::vector<corpus::Thread> load_corpus(const RunConfig& cfg,
                                        std::vector<corpus::Diagnostic>* diagnostics = nullptr) {
  require_file(cfg.corpus, "corpus");
  auto report = corpus::load_threads(cfg.corpus);
  if (diagnostics) *diagnostics = report.diagnostics;
  return std::move(report.threads);
}

std::optional<text::PosTagger> load_tagger(const RunConfig& cfg) {
  if (cfg.tagger_sample.empty()) return std::nullopt;
  require_file(cfg.tagger_sample, "tagger sample");
  return text::PosTagger::train_from_file(cfg.tagger_sample);
}

std::vector<corpus::Chain> all_chains(const std::vector<corpus::Thread>& threads,
                                      const RunConfig& cfg) {
  std::vector<corpus::Chain> chains;
  for (const auto& t : threads) {
    auto c = corpus::extract_chains(t, cfg.min_len, cfg.max_len);
    chains.insert(chains.end(), c.begin(), c.end());
  }
  return chains;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& spec) {
  const auto dots = spec.find("..");
  if (dots == std::string::npos) {
    const std::size_t k = std::stoull(spec);
    return {k, k};
  }
  return {std::stoull(spec.substr(0, dots)), std::stoull(spec.substr(dots + 2))};
}

std::uint64_t tagset_hash_of(const std::optional<text::PosTagger>& tagger) {
  if (!tagger) return 0;
  std::string joined;
  auto tags = tagger->tagset();
  std::sort(tags.begin(), tags.end());
  for (const auto& t : tags) joined += t + "\n";
  return fnv1a(joined);
}

// ---------------------------------------------------------------------------

void cmd_ingest(const RunConfig& cfg) {
  std::vector<corpus::Diagnostic> diagnostics;
  auto threads = load_corpus(cfg, &diagnostics);
  fs::create_directories(cfg.out);

  corpus::save_threads(threads, fs::path(cfg.out) / "corpus.ndjson");

  auto chains_csv = open_out(fs::path(cfg.out) / "chains.csv");
  chains_csv << "chain_id,thread_id,length,label\n";
  for (const auto& t : threads) {
    for (const auto& c : corpus::extract_chains(t, cfg.min_len, cfg.max_len)) {
      chains_csv << c.id() << ',' << c.thread_id << ',' << c.length() << ','
                 << (c.label ? 1 : 0) << '\n';
    }
  }
  auto diag_csv = open_out(fs::path(cfg.out) / "diagnostics.csv");
  diag_csv << "line,message\n";
  for (const auto& d : diagnostics) {
    std::string msg = d.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    diag_csv << d.line << ',' << msg << '\n';
  }
  write_manifest(cfg, "ingest");
}

void cmd_train_embeddings(const RunConfig& cfg) {
  auto threads = load_corpus(cfg);
  fs::create_directories(cfg.out);

  std::vector<std::vector<std::string>> sentences;
  for (const auto& t : threads) {
    for (const auto& c : t.comments) {
      const auto body = text::utf8_decode(c.body);
      for (const auto& span : text::split_sentences(body)) {
        auto toks = text::tokenize(body.substr(span.begin, span.end - span.begin), span.begin);
        if (toks.empty()) continue;
        std::vector<std::string> words;
        for (const auto& tok : toks) words.push_back(tok.surface);
        sentences.push_back(std::move(words));
      }
    }
  }
  text::SkipgramConfig sc;
  sc.dim = cfg.dim;
  sc.epochs = cfg.epochs;
  sc.window = cfg.window;
  sc.negatives = cfg.negatives;
  sc.seed = *cfg.seed;
  std::vector<double> losses;
  auto table = text::train_skipgram(sentences, sc, &losses);
  text::save_embeddings(table, fs::path(cfg.out) / "embeddings.txt");

  auto loss_csv = open_out(fs::path(cfg.out) / "embedding_losses.csv");
  loss_csv << "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) loss_csv << e << ',' << fmt(losses[e]) << '\n';
  write_manifest(cfg, "train-embeddings");
}

persuasion::ModelConfig model_config_from(const RunConfig& cfg) {
  persuasion::ModelConfig mc;
  mc.kind = persuasion::model_kind_from(cfg.model);
  mc.word_hidden = cfg.word_hidden;
  mc.sent_hidden = cfg.sent_hidden;
  mc.out_hidden = cfg.out_hidden;
  mc.max_sentences = cfg.max_sentences;
  mc.lambda = cfg.lambda;
  return mc;
}

struct FeaturePipeline {
  persuasion::CorpusTermStats stats;
  persuasion::PolarityLexicon lexicon;
  persuasion::FeatureSpace space;
};

// feature-space sidecar for the lstm-f variant; the layout and the frozen
// standardization must come from the training corpus at inference time
void save_feature_space(const FeaturePipeline& p, const fs::path& path) {
  json j;
  j["bigrams"] = p.space.bigram_keys();
  j["trigrams"] = p.space.trigram_keys();
  j["mean"] = p.space.mean();
  j["stddev"] = p.space.stddev();
  j["unique_terms"] = p.stats.unique_terms();
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

FeaturePipeline build_feature_pipeline(const std::vector<corpus::Thread>& threads,
                                       const RunConfig& cfg,
                                       const text::PosTagger* tagger) {
  FeaturePipeline p;
  std::vector<text::AnalyzedComment> comments;
  for (const auto& t : threads) {
    for (const auto& c : t.comments) {
      comments.push_back(text::analyze_comment(c.id, c.body, c.karma, c.delta_awarded, tagger));
    }
  }
  p.stats = persuasion::CorpusTermStats::build(comments);
  if (!cfg.lexicon.empty()) {
    require_file(cfg.lexicon, "polarity lexicon");
    p.lexicon = persuasion::PolarityLexicon::load(cfg.lexicon);
  }
  p.space = persuasion::FeatureSpace::build(comments, p.stats, p.lexicon);
  return p;
}

FeaturePipeline load_feature_pipeline(const fs::path& sidecar, const RunConfig& cfg) {
  std::ifstream is(sidecar);
  if (!is) throw std::runtime_error("feature space sidecar not found: " + sidecar.string());
  json j = json::parse(is);
  FeaturePipeline p;
  p.space = persuasion::FeatureSpace::restore(
      j.at("bigrams").get<std::vector<std::string>>(),
      j.at("trigrams").get<std::vector<std::string>>(), j.at("mean").get<std::vector<double>>(),
      j.at("stddev").get<std::vector<double>>());
  p.stats.term_count = j.at("unique_terms").get<std::size_t>();
  if (!cfg.lexicon.empty()) {
    require_file(cfg.lexicon, "polarity lexicon");
    p.lexicon = persuasion::PolarityLexicon::load(cfg.lexicon);
  }
  return p;
}

std::vector<persuasion::EncodedChain> encode_for_model(
    const std::vector<corpus::Chain>& chains, const persuasion::ModelConfig& mc,
    const text::EmbeddingTable& table, const FeaturePipeline* features,
    const text::PosTagger* tagger) {
  std::vector<persuasion::EncodedChain> encoded;
  encoded.reserve(chains.size());
  for (const auto& chain : chains) {
    auto ec = persuasion::encode_chain(chain, table);
    if (mc.kind == persuasion::ModelKind::LstmFeatures) {
      for (std::size_t i = 0; i < chain.comments.size(); ++i) {
        const auto& c = chain.comments[i];
        auto analyzed = text::analyze_comment(c.id, c.body, c.karma, c.delta_awarded, tagger);
        ec.comments[i].features = features->space.vectorize(
            persuasion::extract_features(analyzed, features->stats, features->lexicon));
      }
    }
    encoded.push_back(std::move(ec));
  }
  return encoded;
}

void cmd_train(const RunConfig& cfg) {
  auto threads = load_corpus(cfg);
  auto chains = all_chains(threads, cfg);
  if (chains.empty()) throw std::runtime_error("no chains in [min_len, max_len] to train on");
  fs::create_directories(cfg.out);

  const auto tagger = load_tagger(cfg);
  const auto mc = model_config_from(cfg);

  text::EmbeddingTable table;
  std::optional<FeaturePipeline> features;
  if (mc.kind == persuasion::ModelKind::LstmFeatures) {
    features = build_feature_pipeline(threads, cfg, tagger ? &*tagger : nullptr);
  } else {
    require_file(cfg.embeddings, "embeddings");
    table = text::load_embeddings(cfg.embeddings);
  }

  auto encoded = encode_for_model(chains, mc, table, features ? &*features : nullptr,
                                  tagger ? &*tagger : nullptr);
  persuasion::ModelConfig mc_full = mc;
  if (mc.kind == persuasion::ModelKind::LstmFeatures) {
    mc_full.feature_dim = features->space.dim();
  }

  persuasion::TrainConfig tc;
  tc.epochs = cfg.train_epochs;
  tc.folds = cfg.folds;
  tc.lambda = cfg.lambda;
  tc.lr = cfg.lr;
  tc.seed = *cfg.seed;
  auto result = persuasion::train(
      mc_full, mc.kind == persuasion::ModelKind::LstmFeatures ? nullptr : &table, encoded, tc);
  result.model.tagset_hash = tagset_hash_of(tagger);

  persuasion::save_model(result.model, fs::path(cfg.out) / "model.dmn");
  if (features) save_feature_space(*features, fs::path(cfg.out) / "feature_space.json");

  auto epochs_csv = open_out(fs::path(cfg.out) / "epochs.csv");
  epochs_csv << "fold,epoch,train_loss,val_loss\n";
  for (const auto& e : result.epoch_logs) {
    epochs_csv << e.fold << ',' << e.epoch << ',' << fmt(e.train_loss) << ','
               << fmt(e.val_loss) << '\n';
  }
  auto folds_csv = open_out(fs::path(cfg.out) / "folds.csv");
  folds_csv << "fold,precision,recall,f1,auc\n";
  for (const auto& m : result.fold_metrics) {
    folds_csv << m.fold << ',' << fmt(m.precision) << ',' << fmt(m.recall) << ','
              << fmt(m.f1) << ',' << fmt(m.auc) << '\n';
  }
  write_manifest(cfg, "train");
}

struct LoadedModel {
  persuasion::PersuasionModel model;
  text::EmbeddingTable table;  // vocab view for encoding
};

LoadedModel load_model_for_inference(const RunConfig& cfg) {
  require_file(cfg.checkpoint, "checkpoint");
  LoadedModel lm{persuasion::load_model(cfg.checkpoint), {}};
  lm.table.dim = lm.model.config.embedding_dim;
  lm.table.words = lm.model.vocab_words;
  lm.table.vocab = lm.model.vocab;
  lm.table.vectors = lm.model.embedding.defined() ? lm.model.embedding.values()
                                                  : std::vector<double>{};
  return lm;
}

void cmd_predict(const RunConfig& cfg) {
  auto threads = load_corpus(cfg);
  auto chains = all_chains(threads, cfg);
  auto lm = load_model_for_inference(cfg);
  fs::create_directories(cfg.out);

  const auto tagger = load_tagger(cfg);
  std::optional<FeaturePipeline> features;
  if (lm.model.config.kind == persuasion::ModelKind::LstmFeatures) {
    features = load_feature_pipeline(
        fs::path(cfg.checkpoint).parent_path() / "feature_space.json", cfg);
  }
  auto encoded = encode_for_model(chains, lm.model.config, lm.table,
                                  features ? &*features : nullptr, tagger ? &*tagger : nullptr);

  std::size_t k_lo = 0, k_hi = 0;
  const bool sweep = !cfg.prefix_k.empty();
  if (sweep) std::tie(k_lo, k_hi) = parse_range(cfg.prefix_k);

  auto pred_csv = open_out(fs::path(cfg.out) / "predictions.csv");
  pred_csv << "chain_id,k,length,label,p,scores\n";
  std::map<std::size_t, std::pair<std::vector<bool>, std::vector<bool>>> by_k;
  std::vector<eval::ChainOutcome> outcomes;

  auto emit = [&](const persuasion::EncodedChain& chain, std::size_t k,
                  const persuasion::ChainPrediction& pred) {
    pred_csv << chain.id << ',' << k << ',' << chain.comments.size() << ','
             << (chain.label ? 1 : 0) << ',' << fmt(pred.delta_probability) << ',';
    for (std::size_t i = 0; i < pred.predicted_scores.size(); ++i) {
      if (i) pred_csv << ';';
      pred_csv << fmt(pred.predicted_scores[i]);
    }
    pred_csv << '\n';
  };

  for (const auto& chain : encoded) {
    if (sweep) {
      const std::size_t hi = std::min(k_hi, chain.comments.size());
      for (std::size_t k = std::max<std::size_t>(k_lo, 3); k <= hi; ++k) {
        auto pred = persuasion::predict_prefix(lm.model, chain, k);
        emit(chain, k, pred);
        auto& bucket = by_k[k];
        bucket.first.push_back(pred.delta_probability > 0.5);
        bucket.second.push_back(chain.label);
      }
    } else {
      auto pred = persuasion::forward_chain(lm.model, chain);
      emit(chain, chain.comments.size(), pred);
      outcomes.push_back(
          {chain.comments.size(), pred.delta_probability > 0.5, chain.label});
    }
  }

  if (sweep) {
    auto f1_csv = open_out(fs::path(cfg.out) / "prefix_metrics.csv");
    f1_csv << "k,n,precision,recall,f1\n";
    for (const auto& [k, bucket] : by_k) {
      const auto prf = eval::prf1(bucket.first, bucket.second);
      f1_csv << k << ',' << bucket.first.size() << ',' << fmt(prf.precision) << ','
             << fmt(prf.recall) << ',' << fmt(prf.f1) << '\n';
    }
  } else {
    auto chainwise_csv = open_out(fs::path(cfg.out) / "chainwise.csv");
    chainwise_csv << "length,n,precision,recall,f1\n";
    for (const auto& row : eval::chainwise_report(outcomes)) {
      chainwise_csv << row.length << ',' << row.count << ',' << fmt(row.prf.precision) << ','
                    << fmt(row.prf.recall) << ',' << fmt(row.prf.f1) << '\n';
    }
  }
  write_manifest(cfg, "predict");
}

void cmd_rank(const RunConfig& cfg) {
  auto threads = load_corpus(cfg);
  auto lm = load_model_for_inference(cfg);
  fs::create_directories(cfg.out);

  std::vector<eval::RankedThread> ranked;
  for (const auto& t : threads) {
    auto chains = corpus::extract_chains(t, cfg.min_len, cfg.max_len);
    if (chains.empty()) continue;
    // mean predicted score per comment over the chains containing it
    std::map<std::string, std::pair<double, std::size_t>> acc;
    std::map<std::string, double> karma;
    for (const auto& chain : chains) {
      auto encoded = persuasion::encode_chain(chain, lm.table);
      auto pred = persuasion::forward_chain(lm.model, encoded);
      for (std::size_t i = 1; i < chain.comments.size(); ++i) {
        auto& slot = acc[chain.comments[i].id];
        slot.first += pred.predicted_scores[i - 1];
        slot.second += 1;
        karma[chain.comments[i].id] = static_cast<double>(chain.comments[i].karma);
      }
    }
    eval::RankedThread rt;
    rt.thread_id = t.thread_id;
    for (const auto& [id, sum_count] : acc) {
      rt.comment_ids.push_back(id);
      rt.predicted.push_back(sum_count.first / static_cast<double>(sum_count.second));
      rt.truth.push_back(karma[id]);
    }
    if (!rt.comment_ids.empty()) ranked.push_back(std::move(rt));
  }

  const std::size_t ks[] = {1, 3, 5};
  auto rows = eval::rank_metrics(ranked, ks);
  auto csv = open_out(fs::path(cfg.out) / "rank.csv");
  csv << "k,threads,map,mrr,kendall\n";
  for (const auto& row : rows) {
    csv << row.k << ',' << row.threads << ',' << fmt(row.map) << ','
        << (row.mrr ? fmt(*row.mrr) : "--") << ','
        << (row.kendall ? fmt(*row.kendall) : "--") << '\n';
  }
  write_manifest(cfg, "rank");
}

void cmd_mine(const RunConfig& cfg) {
  auto threads = load_corpus(cfg);
  require_file(cfg.embeddings, "embeddings");
  auto table = text::load_embeddings(cfg.embeddings);
  fs::create_directories(cfg.out);

  const auto tagger = load_tagger(cfg);
  auto analyzed = text::analyze_threads(threads, tagger ? &*tagger : nullptr);
  const auto df = argmine::DocFreq::build(analyzed);

  // one corpus-wide tagset so augmented widths agree across threads
  std::set<std::string> tags;
  for (const auto& t : analyzed) {
    for (const auto& c : t.comments) {
      for (const auto& s : c.sentences) {
        for (const auto& tok : s.tokens) tags.insert(tok.pos);
      }
    }
  }
  table.tagset.assign(tags.begin(), tags.end());

  argmine::MinerConfig miner;
  miner.n_uni = cfg.n_uni;
  miner.n_bi = cfg.n_bi;
  miner.metric = argmine::metric_from(cfg.metric);
  miner.jobs = std::max<std::size_t>(cfg.jobs, 1);

  auto components = open_out(fs::path(cfg.out) / "components.ndjson");
  auto keywords_csv = open_out(fs::path(cfg.out) / "keywords.csv");
  keywords_csv << "thread_id,ngram,terms,score\n";
  auto diag = open_out(fs::path(cfg.out) / "diagnostics.csv");
  diag << "thread_id,message\n";

  for (const auto& thread : analyzed) {
    auto result = argmine::mine_thread(thread, table, df, miner);
    for (const auto& c : result.components) {
      json j;
      j["comment_id"] = c.comment_id;
      j["start"] = c.start;
      j["end"] = c.end;
      j["kind"] = corpus::to_string(c.kind);
      j["provenance"] = argmine::to_string(c.provenance);
      if (c.provenance == argmine::Provenance::Rule) j["matched_rule"] = c.matched_rule;
      if (c.min_distance) j["min_distance"] = *c.min_distance;
      components << j.dump() << '\n';
    }
    for (const auto& e : result.keywords.unigrams) {
      keywords_csv << thread.thread_id << ",unigram," << e.terms[0] << ',' << fmt(e.score) << '\n';
    }
    for (const auto& e : result.keywords.bigrams) {
      keywords_csv << thread.thread_id << ",bigram," << e.terms[0] << ' ' << e.terms[1] << ','
                   << fmt(e.score) << '\n';
    }
    for (const auto& d : result.diagnostics) {
      std::string msg = d;
      std::replace(msg.begin(), msg.end(), ',', ';');
      diag << thread.thread_id << ',' << msg << '\n';
    }
  }
  write_manifest(cfg, "mine");
}

std::vector<argmine::ArgComponent> load_components(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("components: cannot open " + path.string());
  std::vector<argmine::ArgComponent> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    argmine::ArgComponent c;
    c.comment_id = j.at("comment_id").get<std::string>();
    c.start = j.at("start").get<std::size_t>();
    c.end = j.at("end").get<std::size_t>();
    c.kind = corpus::component_kind_from(j.at("kind").get<std::string>());
    c.provenance = j.at("provenance").get<std::string>() == "rule"
                       ? argmine::Provenance::Rule
                       : argmine::Provenance::Similarity;
    if (j.contains("matched_rule")) c.matched_rule = j["matched_rule"].get<std::string>();
    if (j.contains("min_distance")) c.min_distance = j["min_distance"].get<double>();
    out.push_back(std::move(c));
  }
  return out;
}

void cmd_evaluate(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  std::set<std::string> reports;
  {
    std::stringstream ss(cfg.report);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) reports.insert(item);
    }
  }
  const std::set<std::string> known = {"detect", "span", "export", "attention"};
  for (const auto& r : reports) {
    if (!known.count(r)) throw std::runtime_error("unknown report '" + r + "'");
  }

  if (reports.count("detect")) {
    require_file(cfg.predictions, "predictions");
    std::ifstream is(cfg.predictions);
    std::string line;
    std::getline(is, line);  // header
    std::vector<bool> preds, labels;
    std::vector<double> probs;
    std::vector<eval::ChainOutcome> outcomes;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string chain_id, k, length, label, p, scores;
      std::getline(ss, chain_id, ',');
      std::getline(ss, k, ',');
      std::getline(ss, length, ',');
      std::getline(ss, label, ',');
      std::getline(ss, p, ',');
      const double prob = std::stod(p);
      const bool lab = label == "1";
      preds.push_back(prob > 0.5);
      labels.push_back(lab);
      probs.push_back(prob);
      outcomes.push_back({std::stoull(length), prob > 0.5, lab});
    }
    const auto prf = eval::prf1(preds, labels);
    auto csv = open_out(fs::path(cfg.out) / "detect.csv");
    csv << "n,precision,recall,f1,auc\n";
    csv << preds.size() << ',' << fmt(prf.precision) << ',' << fmt(prf.recall) << ','
        << fmt(prf.f1) << ',' << fmt(eval::auc(probs, labels)) << '\n';
    auto chainwise_csv = open_out(fs::path(cfg.out) / "chainwise.csv");
    chainwise_csv << "length,n,precision,recall,f1\n";
    for (const auto& row : eval::chainwise_report(outcomes)) {
      chainwise_csv << row.length << ',' << row.count << ',' << fmt(row.prf.precision) << ','
                    << fmt(row.prf.recall) << ',' << fmt(row.prf.f1) << '\n';
    }
  }

  if (reports.count("span")) {
    require_file(cfg.components, "components");
    require_file(cfg.annotations, "annotations");
    auto threads = load_corpus(cfg);
    const auto tagger = load_tagger(cfg);
    auto analyzed = text::analyze_threads(threads, tagger ? &*tagger : nullptr);
    auto gold = corpus::load_annotations(cfg.annotations, threads);
    auto components = load_components(cfg.components);
    auto tokens = eval::build_token_index(analyzed);

    auto csv = open_out(fs::path(cfg.out) / "span.csv");
    csv << "kind,provenance,mode,theta,precision,recall,f1\n";
    auto emit = [&](const std::string& provenance,
                    const std::vector<argmine::ArgComponent>& comps) {
      eval::SpanMatchConfig exact;
      exact.mode = eval::SpanMatchConfig::Mode::Exact;
      eval::SpanMatchConfig overlap;
      overlap.theta = cfg.theta;
      for (const auto& [mode_name, mode_cfg] :
           std::vector<std::pair<std::string, eval::SpanMatchConfig>>{{"exact", exact},
                                                                      {"overlap", overlap}}) {
        const auto s = eval::span_score(comps, gold, tokens, mode_cfg);
        csv << "claim," << provenance << ',' << mode_name << ',' << fmt(mode_cfg.theta) << ','
            << fmt(s.claim.precision) << ',' << fmt(s.claim.recall) << ',' << fmt(s.claim.f1)
            << '\n';
        csv << "premise," << provenance << ',' << mode_name << ',' << fmt(mode_cfg.theta) << ','
            << fmt(s.premise.precision) << ',' << fmt(s.premise.recall) << ','
            << fmt(s.premise.f1) << '\n';
      }
    };
    std::vector<argmine::ArgComponent> rule_only;
    for (const auto& c : components) {
      if (c.provenance == argmine::Provenance::Rule) rule_only.push_back(c);
    }
    emit("rule", rule_only);
    emit("rule+similarity", components);
  }

  if (reports.count("export")) {
    require_file(cfg.components, "components");
    auto threads = load_corpus(cfg);
    const auto tagger = load_tagger(cfg);
    auto components = load_components(cfg.components);

    std::vector<text::AnalyzedComment> comments;
    for (const auto& t : threads) {
      for (const auto& c : t.comments) {
        comments.push_back(text::analyze_comment(c.id, c.body, c.karma, c.delta_awarded,
                                                 tagger ? &*tagger : nullptr));
      }
    }
    std::map<std::string, std::vector<double>> attention;
    if (!cfg.checkpoint.empty()) {
      auto lm = load_model_for_inference(cfg);
      if (lm.model.config.kind != persuasion::ModelKind::HlstmAttention) {
        throw std::runtime_error("the export report needs an attention-model checkpoint");
      }
      for (const auto& c : comments) {
        auto sel = argmine::attention_argumentative(c, lm.model, 1.0);
        if (!sel.raw_weights.empty()) attention[c.id] = sel.raw_weights;
      }
    }
    auto report = eval::component_score_export(comments, components, attention);
    auto csv = open_out(fs::path(cfg.out) / "component_score.csv");
    csv << "comment_id,karma,claim_count,premise_count,weighted_fraction\n";
    for (const auto& row : report.rows) {
      csv << row.comment_id << ',' << row.karma << ',' << row.claim_count << ','
          << row.premise_count << ',' << fmt(row.weighted_fraction) << '\n';
    }
    auto emit_corr = [&](const std::string& name, const eval::Correlation& c) {
      csv << "#" << name << "_pearson,," << (c.defined ? fmt(c.pearson) : "nan") << ",,\n";
      csv << "#" << name << "_spearman,," << (c.defined ? fmt(c.spearman) : "nan") << ",,\n";
    };
    emit_corr("claim", report.claim_corr);
    emit_corr("premise", report.premise_corr);
    emit_corr("weighted", report.weighted_corr);
  }

  if (reports.count("attention")) {
    require_file(cfg.annotations, "annotations");
    auto threads = load_corpus(cfg);
    const auto tagger = load_tagger(cfg);
    auto analyzed = text::analyze_threads(threads, tagger ? &*tagger : nullptr);
    auto gold = corpus::load_annotations(cfg.annotations, threads);
    auto lm = load_model_for_inference(cfg);
    if (lm.model.config.kind != persuasion::ModelKind::HlstmAttention) {
      throw std::runtime_error("the attention report needs an attention-model checkpoint");
    }
    const double thresholds[] = {0.3, 0.5, 0.8};
    auto rows = eval::attention_report(analyzed, gold, lm.model, thresholds);
    auto csv = open_out(fs::path(cfg.out) / "attention.csv");
    csv << "mode,threshold,precision,recall,f1\n";
    for (const auto& row : rows) {
      csv << row.mode << ',' << fmt(row.threshold) << ',' << fmt(row.prf.precision) << ','
          << fmt(row.prf.recall) << ',' << fmt(row.prf.f1) << '\n';
    }
  }
  write_manifest(cfg, "evaluate");
}

void cmd_sweep(const RunConfig& cfg) {
  auto threads = load_corpus(cfg);
  require_file(cfg.annotations, "annotations");
  auto gold = corpus::load_annotations(cfg.annotations, threads);
  fs::create_directories(cfg.out);

  const auto tagger = load_tagger(cfg);
  auto analyzed = text::analyze_threads(threads, tagger ? &*tagger : nullptr);
  const auto df = argmine::DocFreq::build(analyzed);

  std::vector<std::size_t> caps;
  {
    std::stringstream ss(cfg.caps);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) caps.push_back(std::stoull(item));
    }
  }
  auto rows = eval::keyword_sweep(analyzed, gold, df, caps);
  auto csv = open_out(fs::path(cfg.out) / "sweep.csv");
  csv << "ngram,cap,precision_defined,precision,recall,f1\n";
  for (const auto& row : rows) {
    csv << row.ngram << ',' << row.cap << ',' << (row.precision_defined ? 1 : 0) << ','
        << fmt(row.prf.precision) << ',' << fmt(row.prf.recall) << ',' << fmt(row.prf.f1)
        << '\n';
  }
  write_manifest(cfg, "sweep");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;

  // the config file loads first so explicit flags can override it
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        load_config_file(argv[i + 1], cfg);
      } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << '\n';
        return 1;
      }
    }
  }

  CLI::App app{"persuasion detection and argument mining for threaded discussions"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override it");

  auto add_common = [&](CLI::App* sub) {
    // the file itself is loaded in the pre-scan above; registering the
    // option here only makes the parser accept it after the subcommand
    sub->add_option("--config", config_path, "key = value config file; flags override it");
    sub->add_option("--corpus", cfg.corpus, "newline-delimited thread corpus");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--seed", cfg.seed, "run seed (required)");
    sub->add_option("--jobs", cfg.jobs, "worker cap for parallel sections");
    sub->add_option("--tagger-sample", cfg.tagger_sample, "token_tag training sample");
    sub->add_option("--min-len", cfg.min_len, "minimum chain length");
    sub->add_option("--max-len", cfg.max_len, "maximum chain length");
  };

  auto* ingest = app.add_subcommand("ingest", "validate a corpus and extract chains");
  add_common(ingest);

  auto* train_emb = app.add_subcommand("train-embeddings", "train skip-gram word vectors");
  add_common(train_emb);
  train_emb->add_option("--dim", cfg.dim, "embedding size");
  train_emb->add_option("--epochs", cfg.epochs, "training epochs");
  train_emb->add_option("--window", cfg.window, "context window");
  train_emb->add_option("--negatives", cfg.negatives, "negative samples per pair");

  auto* train = app.add_subcommand("train", "train a persuasion model");
  add_common(train);
  train->add_option("--embeddings", cfg.embeddings, "embedding table (text format)");
  train->add_option("--model", cfg.model, "hlstm-att | hlstm | lstm-f");
  train->add_option("--epochs", cfg.train_epochs, "epochs per fold");
  train->add_option("--folds", cfg.folds, "cross-validation folds (1 = none)");
  train->add_option("--lr", cfg.lr, "adam learning rate");
  train->add_option("--lambda", cfg.lambda, "score-loss weight");
  train->add_option("--word-hidden", cfg.word_hidden, "word-level LSTM width");
  train->add_option("--sent-hidden", cfg.sent_hidden, "sentence-level LSTM width");
  train->add_option("--out-hidden", cfg.out_hidden, "output LSTM width");
  train->add_option("--max-sentences", cfg.max_sentences, "sentence positions per comment");
  train->add_option("--lexicon", cfg.lexicon, "polarity lexicon (lstm-f features)");

  auto* predict = app.add_subcommand("predict", "score chains with a trained model");
  add_common(predict);
  predict->add_option("--checkpoint", cfg.checkpoint, "trained model checkpoint");
  predict->add_option("--prefix-k", cfg.prefix_k, "prefix sweep, e.g. 3..8");
  predict->add_option("--lexicon", cfg.lexicon, "polarity lexicon (lstm-f features)");

  auto* rank = app.add_subcommand("rank", "rank comments by predicted score");
  add_common(rank);
  rank->add_option("--checkpoint", cfg.checkpoint, "trained model checkpoint");

  auto* mine = app.add_subcommand("mine", "extract argument components");
  add_common(mine);
  mine->add_option("--embeddings", cfg.embeddings, "embedding table (text format)");
  mine->add_option("--metric", cfg.metric, "dtw | cosine | wmd | kl");
  mine->add_option("--n-uni", cfg.n_uni, "unigram keyword cap");
  mine->add_option("--n-bi", cfg.n_bi, "bigram keyword cap");

  auto* evaluate = app.add_subcommand("evaluate", "emit report tables");
  add_common(evaluate);
  evaluate->add_option("--report", cfg.report, "comma list of detect,span,export");
  evaluate->add_option("--predictions", cfg.predictions, "predictions.csv from predict");
  evaluate->add_option("--components", cfg.components, "components.ndjson from mine");
  evaluate->add_option("--annotations", cfg.annotations, "gold annotation file");
  evaluate->add_option("--checkpoint", cfg.checkpoint, "model for attention export");
  evaluate->add_option("--theta", cfg.theta, "token-overlap threshold");

  auto* sweep = app.add_subcommand("sweep", "keyword-cap sweep against annotations");
  add_common(sweep);
  sweep->add_option("--annotations", cfg.annotations, "gold annotation file");
  sweep->add_option("--caps", cfg.caps, "comma list of keyword caps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", std::string("usage: ") + e.what()}}.dump() << '\n';
    return 1;
  }

  try {
    if (!cfg.seed.has_value()) throw std::runtime_error("a seed is required (--seed or config)");
    if (ingest->parsed()) cmd_ingest(cfg);
    if (train_emb->parsed()) cmd_train_embeddings(cfg);
    if (train->parsed()) cmd_train(cfg);
    if (predict->parsed()) cmd_predict(cfg);
    if (rank->parsed()) cmd_rank(cfg);
    if (mine->parsed()) cmd_mine(cfg);
    if (evaluate->parsed()) cmd_evaluate(cfg);
    if (sweep->parsed()) cmd_sweep(cfg);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
