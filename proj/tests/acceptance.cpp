// Acceptance suite: one check per release criterion, one pass/fail line
// each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

#include "deltamine/argminer.hpp"
#include "deltamine/corpus.hpp"
#include "deltamine/eval.hpp"
#include "deltamine/features.hpp"
#include "deltamine/persuasion.hpp"
#include "deltamine/textprep.hpp"
#include "support/fixtures.hpp"
#include "support/fixtures_argmine.hpp"
#include "support/oracles.hpp"

using namespace deltamine;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome outcome;
  try {
    outcome = check();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count() /
      1000.0;
  std::printf("[%s] %2d. %-28s %6.1fs  %s\n", outcome.pass ? "PASS" : "FAIL", number,
              name.c_str(), secs, outcome.detail.c_str());
  std::fflush(stdout);
  if (!outcome.pass) ++failures;
}

struct Setup {
  std::vector<corpus::Chain> chains;
  text::EmbeddingTable table;
  std::vector<persuasion::EncodedChain> encoded;
};

Setup make_setup(const fixtures::MarkerCorpusConfig& cfg, std::size_t dim,
                 std::uint64_t table_seed) {
  Setup s;
  s.chains = fixtures::make_marker_chains(cfg);
  s.table = fixtures::make_random_table(s.chains, dim, table_seed);
  s.encoded = fixtures::encode_all(s.chains, s.table);
  return s;
}

persuasion::ModelConfig tiny_model(std::size_t hidden = 5) {
  persuasion::ModelConfig mc;
  mc.word_hidden = hidden;
  mc.sent_hidden = hidden;
  mc.out_hidden = hidden;
  mc.max_sentences = 4;
  return mc;
}

// ---------------------------------------------------------------------------
// 1. gradients of the joint loss vs central finite differences

Outcome check_gradients() {
  fixtures::MarkerCorpusConfig cfg;
  cfg.chains = 3;
  cfg.max_sentences = 2;
  cfg.max_words = 4;
  cfg.min_len = 3;
  cfg.max_len = 3;

  double worst = 0.0;
  std::size_t total = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = 1000 + seed;
    auto s = make_setup(cfg, 4, 2000 + seed);
    auto model = persuasion::PersuasionModel::init(tiny_model(5), s.table, 3000 + seed);
    model.scaler = persuasion::ScoreScaler::fit(s.encoded);
    const auto& chain = s.encoded[seed % s.encoded.size()];
    auto build = [&]() {
      auto fwd = persuasion::forward_graph(model, chain);
      return persuasion::joint_loss_graph(fwd, chain, 1.87, 0.3, model.scaler);
    };
    auto result = oracle::gradcheck(
        model.parameters(), [&] { return build().item(); }, [&] { nn::backward(build()); },
        1e-5);
    worst = std::max(worst, result.max_rel_err);
    total += result.checked;
  }
  std::ostringstream os;
  os << "max rel err " << worst << " over " << total << " parameters, 5 seeds";
  return {worst < 1e-4, os.str()};
}

// ---------------------------------------------------------------------------
// 2. forward pass vs the straight-line re-implementation

Outcome check_architecture_oracle() {
  double worst = 0.0;
  std::size_t compared = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    fixtures::MarkerCorpusConfig cfg;
    cfg.chains = 2;
    cfg.seed = 400 + seed;
    auto s = make_setup(cfg, 5, 500 + seed);
    auto model = persuasion::PersuasionModel::init(tiny_model(6), s.table, 600 + seed);
    model.scaler = persuasion::ScoreScaler::fit(s.encoded);
    for (const auto& chain : s.encoded) {
      const auto got = persuasion::forward_chain(model, chain);
      const auto want = oracle::forward_chain(model, chain);
      worst = std::max(worst, std::abs(got.delta_probability - want.p));
      for (std::size_t i = 0; i < want.scores.size(); ++i) {
        worst = std::max(worst, std::abs(got.standardized_scores[i] - want.scores[i]));
      }
      for (std::size_t i = 0; i < want.attention.size(); ++i) {
        for (std::size_t j = 0; j < want.attention[i].size(); ++j) {
          worst = std::max(worst,
                           std::abs(got.sentence_attention[i][j] - want.attention[i][j]));
        }
      }
      ++compared;
    }
  }
  std::ostringstream os;
  os << "max abs deviation " << worst << " over " << compared << " chains";
  return {worst < 1e-10, os.str()};
}

// ---------------------------------------------------------------------------
// 3. attention weights bounded by the logistic-tanh composition

Outcome check_attention_bound() {
  fixtures::MarkerCorpusConfig cfg;
  cfg.chains = 10;
  cfg.seed = 77;
  auto s = make_setup(cfg, 5, 78);

  Rng rng(79);
  std::size_t calls = 0, weights_seen = 0;
  double lo = 1.0, hi = 0.0;
  bool threshold_clean = true;
  while (calls < 1000) {
    auto model = persuasion::PersuasionModel::init(tiny_model(5), s.table, rng.next_u64());
    // exaggerated attention parameters probe the saturation limits
    for (auto& v : model.attn_w.values()) v = rng.uniform(-60, 60);
    for (auto& v : model.attn_b.values()) v = rng.uniform(-60, 60);
    for (const auto& chain : s.encoded) {
      for (std::size_t i = 1; i < chain.comments.size() && calls < 1000; ++i) {
        auto [vec, attn] = persuasion::encode_comment(model, chain.comments[i]);
        ++calls;
        for (double w : attn) {
          ++weights_seen;
          lo = std::min(lo, w);
          hi = std::max(hi, w);
        }
        // threshold-0.74 extraction on raw weights must be empty
        for (double w : attn) {
          if (w >= 0.74) threshold_clean = false;
        }
      }
    }
  }
  const bool in_bounds = lo > 0.26894 && hi < 0.73106;
  std::ostringstream os;
  os << weights_seen << " weights in [" << lo << ", " << hi << "] over " << calls << " calls";
  return {in_bounds && threshold_clean, os.str()};
}

// ---------------------------------------------------------------------------
// 4. overfit on 20 separable chains

Outcome check_overfit() {
  fixtures::MarkerCorpusConfig cfg;
  cfg.chains = 20;
  cfg.seed = 11;
  cfg.marker_in_last_comment = true;
  auto s = make_setup(cfg, 10, 12);

  persuasion::ModelConfig mc = tiny_model(10);
  mc.max_sentences = 6;
  persuasion::TrainConfig tc;
  tc.epochs = 200;
  tc.folds = 1;
  tc.seed = 13;
  tc.lr = 0.01;

  auto r1 = persuasion::train(mc, &s.table, s.encoded, tc);
  auto r2 = persuasion::train(mc, &s.table, s.encoded, tc);

  std::vector<bool> preds, labels;
  double mse = 0.0;
  std::size_t n_scores = 0;
  for (const auto& chain : s.encoded) {
    auto pred = persuasion::forward_chain(r1.model, chain);
    preds.push_back(pred.delta_probability > 0.5);
    labels.push_back(chain.label);
    for (std::size_t i = 0; i < pred.standardized_scores.size(); ++i) {
      const double t = r1.model.scaler.standardize(chain.comments[i + 1].karma);
      const double d = pred.standardized_scores[i] - t;
      mse += d * d;
      ++n_scores;
    }
  }
  mse /= static_cast<double>(n_scores);
  const auto prf = eval::prf1(preds, labels);

  const bool identical = r1.model.embedding.values() == r2.model.embedding.values() &&
                         r1.model.delta_w.values() == r2.model.delta_w.values() &&
                         r1.epoch_logs.back().train_loss == r2.epoch_logs.back().train_loss;
  std::ostringstream os;
  os << "train F1 " << prf.f1 << ", standardized MSE " << mse << ", same-seed runs "
     << (identical ? "bit-identical" : "DIVERGED");
  return {prf.f1 == 1.0 && mse < 0.01 && identical, os.str()};
}

// ---------------------------------------------------------------------------
// 5. attention vs plain on held-out data

Outcome check_generalization() {
  fixtures::MarkerCorpusConfig cfg;
  cfg.chains = 500;
  cfg.seed = 21;
  auto chains = fixtures::make_marker_chains(cfg);
  // deterministic shuffle, 400 train / 100 held out
  Rng rng(22);
  rng.shuffle(chains);
  std::vector<corpus::Chain> train_chains(chains.begin(), chains.begin() + 400);
  std::vector<corpus::Chain> held_out(chains.begin() + 400, chains.end());

  auto table = fixtures::make_random_table(chains, 8, 23);
  auto train_enc = fixtures::encode_all(train_chains, table);
  auto held_enc = fixtures::encode_all(held_out, table);

  persuasion::TrainConfig tc;
  tc.epochs = 5;
  tc.folds = 1;
  tc.seed = 24;
  tc.lr = 0.01;

  auto eval_f1 = [&](const persuasion::PersuasionModel& model) {
    std::vector<bool> preds, labels;
    for (const auto& chain : held_enc) {
      preds.push_back(persuasion::forward_chain(model, chain).delta_probability > 0.5);
      labels.push_back(chain.label);
    }
    return eval::prf1(preds, labels).f1;
  };

  persuasion::ModelConfig att = tiny_model(8);
  att.max_sentences = 6;
  auto r_att = persuasion::train(att, &table, train_enc, tc);
  const double f1_att = eval_f1(r_att.model);

  persuasion::ModelConfig plain = att;
  plain.kind = persuasion::ModelKind::HlstmPlain;
  auto r_plain = persuasion::train(plain, &table, train_enc, tc);
  const double f1_plain = eval_f1(r_plain.model);

  std::ostringstream os;
  os << "held-out F1: attention " << f1_att << ", plain " << f1_plain
     << (f1_att > f1_plain ? " (strict win)" : "");
  return {f1_att >= f1_plain - 0.02, os.str()};
}

// ---------------------------------------------------------------------------
// 6. warping distance vs exhaustive alignment enumeration

Outcome check_dtw_oracle() {
  Rng rng(31);
  double worst = 0.0;
  std::size_t pairs = 0;
  for (int rep = 0; rep < 600; ++rep) {
    const std::size_t dim = 1 + rng.next_below(3);
    const std::size_t n = 1 + rng.next_below(6);
    const std::size_t m = 1 + rng.next_below(6);
    std::vector<std::vector<double>> a(n, std::vector<double>(dim));
    std::vector<std::vector<double>> b(m, std::vector<double>(dim));
    for (auto& v : a) {
      for (auto& x : v) x = rng.uniform(-3, 3);
    }
    for (auto& v : b) {
      for (auto& x : v) x = rng.uniform(-3, 3);
    }
    worst = std::max(worst, std::abs(argmine::dtw_distance(a, b) - oracle::dtw_bruteforce(a, b)));
    ++pairs;
  }

  bool properties = true;
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t dim = 1 + rng.next_below(3);
    const std::size_t n = 1 + rng.next_below(8);
    const std::size_t m = 1 + rng.next_below(8);
    std::vector<std::vector<double>> a(n, std::vector<double>(dim));
    std::vector<std::vector<double>> b(m, std::vector<double>(dim));
    for (auto& v : a) {
      for (auto& x : v) x = rng.uniform(-3, 3);
    }
    for (auto& v : b) {
      for (auto& x : v) x = rng.uniform(-3, 3);
    }
    const double ab = argmine::dtw_distance(a, b);
    const double ba = argmine::dtw_distance(b, a);
    if (ab < 0.0 || ab != ba) properties = false;
    if (argmine::dtw_distance(a, a) != 0.0) properties = false;
  }
  std::ostringstream os;
  os << "max |dp - enumeration| " << worst << " over " << pairs
     << " pairs; identity/symmetry/non-negativity on 10000";
  return {worst < 1e-9 && properties, os.str()};
}

// ---------------------------------------------------------------------------
// 7. discourse rule suite, exact span match

Outcome check_rules() {
  using corpus::ComponentKind;
  struct Case {
    std::string sentence;
    std::vector<std::pair<ComponentKind, std::string>> expect;
  };
  const std::vector<Case> cases = {
      {"I think that taxes are too high", {{ComponentKind::Claim, "taxes are too high"}}},
      {"But I think that the market will recover soon.",
       {{ComponentKind::Claim, "the market will recover soon"}}},
      {"i THINK that we should leave", {{ComponentKind::Claim, "we should leave"}}},
      {"In my opinion, the law is outdated.", {{ComponentKind::Claim, "the law is outdated"}}},
      {"In my opinion this approach works better.",
       {{ComponentKind::Claim, "this approach works better"}}},
      {"And in my opinion, nobody wins here.", {{ComponentKind::Claim, "nobody wins here"}}},
      {"I argue that schools need more funding.",
       {{ComponentKind::Claim, "schools need more funding"}}},
      {"I argue that the tax cut failed", {{ComponentKind::Claim, "the tax cut failed"}}},
      {"Well I argue that remote work helps families.",
       {{ComponentKind::Claim, "remote work helps families"}}},
      {"Taxes are too high because wages stagnated",
       {{ComponentKind::Claim, "Taxes are too high"},
        {ComponentKind::Premise, "wages stagnated"}}},
      {"The team lost because the defense collapsed.",
       {{ComponentKind::Claim, "The team lost"},
        {ComponentKind::Premise, "the defense collapsed"}}},
      {"Rents keep rising because supply stays flat.",
       {{ComponentKind::Claim, "Rents keep rising"},
        {ComponentKind::Premise, "supply stays flat"}}},
      {"It rained, so the game was cancelled",
       {{ComponentKind::Claim, "the game was cancelled"}, {ComponentKind::Premise, "It rained"}}},
      {"The engine failed so we stopped driving.",
       {{ComponentKind::Claim, "we stopped driving"},
        {ComponentKind::Premise, "The engine failed"}}},
      {"Prices doubled, so families cut spending.",
       {{ComponentKind::Claim, "families cut spending"},
        {ComponentKind::Premise, "Prices doubled"}}},
      {"The plan sounds nice but the costs are huge.",
       {{ComponentKind::Premise, "the costs are huge"}}},
      {"He apologized but the damage was done.",
       {{ComponentKind::Premise, "the damage was done"}}},
      {"Markets rallied but wages stayed flat.", {{ComponentKind::Premise, "wages stayed flat"}}},
      {"I think that obamacare was destined to fail because the unregulated market is a plague.",
       {{ComponentKind::Claim, "obamacare was destined to fail"},
        {ComponentKind::Premise, "the unregulated market is a plague"}}},
      {"No markers here.", {}},
      {"The weather is lovely today.", {}},
      {"So what happens next?", {}},
      {"Because of the rain we stayed home.", {}},
      {"They know better.", {}},
  };

  std::size_t matched = 0, expected = 0;
  bool exact = true;
  for (const auto& c : cases) {
    const auto comment = text::analyze_comment("x", c.sentence, 0, false, nullptr);
    std::vector<argmine::RuleMatch> matches;
    if (!comment.sentences.empty()) matches = argmine::apply_rules(comment.sentences[0]);
    expected += c.expect.size();
    if (matches.size() != c.expect.size()) {
      exact = false;
      continue;
    }
    const auto body = text::utf8_decode(c.sentence);
    for (std::size_t i = 0; i < matches.size(); ++i) {
      const std::string got = text::utf8_encode(
          body.substr(matches[i].span.begin, matches[i].span.end - matches[i].span.begin));
      if (matches[i].kind == c.expect[i].first && got == c.expect[i].second) {
        ++matched;
      } else {
        exact = false;
      }
    }
  }
  std::ostringstream os;
  os << matched << "/" << expected << " components span-exact over " << cases.size()
     << " sentences";
  return {exact && matched == expected, os.str()};
}

// ---------------------------------------------------------------------------
// 8. pipeline directional checks on the annotated fixture

Outcome check_pipeline() {
  auto fx = fixtures::make_argmine_fixture();
  auto tokens = eval::build_token_index(fx.analyzed);
  eval::SpanMatchConfig match;  // token overlap, theta 0.5

  auto run_metric = [&](argmine::Metric metric) {
    argmine::MinerConfig mc;
    mc.metric = metric;
    std::vector<argmine::ArgComponent> all, rule_only;
    for (const auto& thread : fx.analyzed) {
      auto result = argmine::mine_thread(thread, fx.table, fx.df, mc);
      for (const auto& c : result.components) {
        all.push_back(c);
        if (c.provenance == argmine::Provenance::Rule) rule_only.push_back(c);
      }
    }
    return std::make_pair(eval::span_score(rule_only, fx.annotations, tokens, match),
                          eval::span_score(all, fx.annotations, tokens, match));
  };

  const auto [rule, dtw] = run_metric(argmine::Metric::Dtw);
  const auto cosine = run_metric(argmine::Metric::Cosine).second;
  const auto wmd = run_metric(argmine::Metric::Wmd).second;
  const auto kl = run_metric(argmine::Metric::Kl).second;

  const bool rule_precision_ok = rule.claim.precision >= 0.9 && rule.premise.precision >= 0.9;
  const bool recall_up =
      rule.claim.recall < dtw.claim.recall && rule.premise.recall < dtw.premise.recall;
  const bool f1_up = dtw.claim.f1 > rule.claim.f1 && dtw.premise.f1 > rule.premise.f1;
  const bool dtw_holds = dtw.claim.f1 >= cosine.claim.f1 - 0.05 &&
                         dtw.claim.f1 >= wmd.claim.f1 - 0.05 &&
                         dtw.claim.f1 >= kl.claim.f1 - 0.05 &&
                         dtw.premise.f1 >= cosine.premise.f1 - 0.05 &&
                         dtw.premise.f1 >= wmd.premise.f1 - 0.05 &&
                         dtw.premise.f1 >= kl.premise.f1 - 0.05;

  std::ostringstream os;
  os << "rule P " << rule.claim.precision << "/" << rule.premise.precision << ", F1 rule "
     << rule.claim.f1 << "/" << rule.premise.f1 << " -> dtw " << dtw.claim.f1 << "/"
     << dtw.premise.f1 << "; baselines claim F1 cos " << cosine.claim.f1 << " wmd "
     << wmd.claim.f1 << " kl " << kl.claim.f1;
  return {rule_precision_ok && recall_up && f1_up && dtw_holds, os.str()};
}

// ---------------------------------------------------------------------------
// 9. metric hand-checks

Outcome check_metric_hand_values() {
  bool ok = true;
  std::ostringstream os;

  const auto prf = eval::prf1({true, true, true, false, false},
                              {true, true, false, true, false});
  ok = ok && std::abs(prf.precision - 2.0 / 3.0) < 1e-12 &&
       std::abs(prf.recall - 2.0 / 3.0) < 1e-12 && std::abs(prf.f1 - 2.0 / 3.0) < 1e-12;

  ok = ok && eval::auc({0.9, 0.8, 0.2}, {true, true, false}) == 1.0;

  // rankings: identical -> MAP = MRR = tau = 1; reversed 3 items -> tau = -1;
  // one transposition -> tau = 1/3
  eval::RankedThread t;
  t.thread_id = "t";
  t.comment_ids = {"a", "b", "c"};
  t.predicted = {3, 2, 1};
  t.truth = {30, 20, 10};
  const std::size_t ks[] = {1, 3};
  auto rows = eval::rank_metrics(std::vector<eval::RankedThread>{t}, ks);
  ok = ok && rows[0].map == 1.0 && rows[0].mrr && *rows[0].mrr == 1.0 && rows[1].kendall &&
       *rows[1].kendall == 1.0;
  const std::vector<std::size_t> abc = {0, 1, 2}, acb = {0, 2, 1}, cba = {2, 1, 0};
  ok = ok && eval::kendall_tau(cba, abc) == -1.0;
  const double tau = eval::kendall_tau(acb, abc);
  ok = ok && std::abs(tau - 1.0 / 3.0) < 1e-12;

  // H_c on |T| = 4, tf = {2, 1}
  persuasion::CorpusTermStats stats;
  stats.terms = {"q", "r", "s", "t"};
  persuasion::PolarityLexicon lex;
  auto comment = text::analyze_comment("c", "Alpha alpha beta.", 0, false, nullptr);
  const double hc = persuasion::extract_features(comment, stats, lex).cumulative_entropy;
  const double hc_expect = (2.0 * (std::log(4.0) - std::log(2.0)) + std::log(4.0)) / 4.0;
  ok = ok && std::abs(hc - hc_expect) < 1e-12 && std::abs(hc - 0.6931) < 1e-4;

  // FOG = 12 on 2 sentences / 20 words / 4 complex
  auto fog_comment = text::analyze_comment(
      "c",
      "The tall man saw four dogs near the old radiator. "
      "Some unbelievable animals can sing dangerously happy songs out today.",
      0, false, nullptr);
  const double fog = persuasion::extract_features(fog_comment, stats, lex).fog_index;
  ok = ok && std::abs(fog - 12.0) < 1e-12;

  // class weight from the corpus counts
  const double w = persuasion::class_weight(55199 - 7370, 7370);
  ok = ok && std::abs(w - 1.870) < 5e-4;

  // seed statistics on pairwise distances {1, 2, 3}
  const std::vector<double> d = {1.0, 2.0, 3.0};
  std::size_t idx = 0;
  auto stats2 = argmine::seed_stats(
      3, 2, [&](std::size_t, std::size_t) { return d[idx++]; },
      [](std::size_t, std::size_t) { return 0.0; });
  ok = ok && std::abs(stats2.d_c - 2.0) < 1e-12 &&
       std::abs(stats2.s_c - std::sqrt(2.0 / 3.0)) < 1e-12;

  os << "prf1 " << prf.f1 << ", tau " << tau << ", H_c " << hc << ", FOG " << fog << ", w " << w
     << ", s " << stats2.s_c;
  return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 10. determinism of the cli and lossless round-trips

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome check_determinism() {
  fixtures::TempDir dir;
  bool ok = true;
  std::ostringstream os;

  // library-level round-trips
  {
    fixtures::MarkerCorpusConfig cfg;
    cfg.chains = 6;
    cfg.seed = 51;
    auto threads = fixtures::chains_to_threads(fixtures::make_marker_chains(cfg));
    corpus::save_threads(threads, dir.file("c.ndjson"));
    auto loaded = corpus::load_threads(dir.file("c.ndjson"));
    ok = ok && loaded.diagnostics.empty() && loaded.threads.size() == threads.size();
    for (std::size_t i = 0; i < threads.size() && ok; ++i) {
      ok = loaded.threads[i] == threads[i];
    }

    auto fx = fixtures::make_argmine_fixture();
    corpus::save_annotations(fx.annotations, dir.file("a.ndjson"));
    ok = ok && corpus::load_annotations(dir.file("a.ndjson"), fx.threads) == fx.annotations;

    text::save_embeddings(fx.table, dir.file("v.txt"));
    auto table = text::load_embeddings(dir.file("v.txt"));
    ok = ok && table.words == fx.table.words && table.vectors == fx.table.vectors;

    auto chains = fixtures::make_marker_chains(cfg);
    auto rtable = fixtures::make_random_table(chains, 6, 52);
    auto model = persuasion::PersuasionModel::init(tiny_model(5), rtable, 53);
    persuasion::save_model(model, dir.file("m.dmn"));
    auto reloaded = persuasion::load_model(dir.file("m.dmn"));
    ok = ok && reloaded.embedding.values() == model.embedding.values() &&
         reloaded.attn_w.values() == model.attn_w.values();
    if (!ok) return {false, "library round-trip failed"};
  }

  // cli-level byte determinism for train / mine / evaluate
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(DELTAMINE_BIN) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str())) == 0;
  };
  auto strip_ts = [](std::string s) {
    std::istringstream is(s);
    std::ostringstream out;
    std::string line;
    while (std::getline(is, line)) {
      if (line.find("\"timestamp\"") == std::string::npos) out << line << '\n';
    }
    return out.str();
  };

  fixtures::MarkerCorpusConfig cfg;
  cfg.chains = 8;
  cfg.seed = 61;
  corpus::save_threads(fixtures::chains_to_threads(fixtures::make_marker_chains(cfg)),
                       dir.file("corpus.ndjson"));
  auto fx = fixtures::make_argmine_fixture();
  corpus::save_threads(fx.threads, dir.file("arg.ndjson"));
  corpus::save_annotations(fx.annotations, dir.file("annos.ndjson"));
  text::save_embeddings(fx.table, dir.file("vec.txt"));

  const std::string corpus_path = dir.file("corpus.ndjson").string();
  ok = ok && run("train-embeddings --corpus " + corpus_path + " --out " +
                 dir.file("e").string() + " --seed 62 --dim 6 --epochs 2");
  const std::string emb = (dir.file("e") / "embeddings.txt").string();

  const std::string train_args = "train --corpus " + corpus_path + " --embeddings " + emb +
                                 " --seed 63 --epochs 2 --folds 1 --word-hidden 5 --sent-hidden "
                                 "5 --out-hidden 5 --out ";
  ok = ok && run(train_args + dir.file("t1").string());
  ok = ok && run(train_args + dir.file("t2").string());
  for (const auto& f : {"model.dmn", "model.dmn.json", "epochs.csv", "folds.csv"}) {
    ok = ok && file_bytes(dir.file("t1") / f) == file_bytes(dir.file("t2") / f);
  }

  const std::string mine_args = "mine --corpus " + dir.file("arg.ndjson").string() +
                                " --embeddings " + dir.file("vec.txt").string() +
                                " --seed 64 --out ";
  ok = ok && run(mine_args + dir.file("m1").string());
  ok = ok && run(mine_args + dir.file("m2").string());
  for (const auto& f : {"components.ndjson", "keywords.csv", "diagnostics.csv"}) {
    ok = ok && file_bytes(dir.file("m1") / f) == file_bytes(dir.file("m2") / f);
  }
  ok = ok && strip_ts(file_bytes(dir.file("m1") / "manifest.json")) ==
                 strip_ts(file_bytes(dir.file("m2") / "manifest.json"));

  const std::string eval_args = "evaluate --report span --components " +
                                (dir.file("m1") / "components.ndjson").string() +
                                " --annotations " + dir.file("annos.ndjson").string() +
                                " --corpus " + dir.file("arg.ndjson").string() +
                                " --seed 65 --out ";
  ok = ok && run(eval_args + dir.file("v1").string());
  ok = ok && run(eval_args + dir.file("v2").string());
  ok = ok && file_bytes(dir.file("v1") / "span.csv") == file_bytes(dir.file("v2") / "span.csv");

  os << "round-trips lossless; train/mine/evaluate byte-identical across reruns";
  return {ok, os.str()};
}

}  // namespace

int main() {
  std::printf("deltamine acceptance suite\n");
  report(1, "gradient-correctness", check_gradients);
  report(2, "architecture-oracle", check_architecture_oracle);
  report(3, "attention-bound", check_attention_bound);
  report(4, "overfit-check", check_overfit);
  report(5, "generalization-direction", check_generalization);
  report(6, "dtw-oracle", check_dtw_oracle);
  report(7, "rule-suite", check_rules);
  report(8, "pipeline-directional", check_pipeline);
  report(9, "metric-hand-checks", check_metric_hand_values);
  report(10, "determinism-round-trips", check_determinism);
  if (failures) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
