#include "deltamine/argminer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace deltamine::argmine {

std::string to_string(Provenance p) { return p == Provenance::Rule ? "rule" : "similarity"; }

std::string to_string(Metric m) {
  switch (m) {
    case Metric::Dtw: return "dtw";
    case Metric::Cosine: return "cosine";
    case Metric::Wmd: return "wmd";
    case Metric::Kl: return "kl";
  }
  return "dtw";
}

Metric metric_from(const std::string& s) {
  if (s == "dtw") return Metric::Dtw;
  if (s == "cosine") return Metric::Cosine;
  if (s == "wmd") return Metric::Wmd;
  if (s == "kl") return Metric::Kl;
  throw std::invalid_argument("unknown similarity metric '" + s + "'");
}

namespace {

bool is_word_token(const text::Token& tok) {
  for (unsigned char c : tok.surface) {
    if (std::isalnum(c) || c >= 0x80) return true;
  }
  return false;
}

}  // namespace

DocFreq DocFreq::build(std::span<const text::AnalyzedThread> threads) {
  DocFreq df;
  for (const auto& thread : threads) {
    for (const auto& comment : thread.comments) {
      std::set<std::string> uni, bi;
      for (const auto& sent : comment.sentences) {
        const auto& toks = sent.tokens;
        for (std::size_t i = 0; i < toks.size(); ++i) {
          if (!is_word_token(toks[i])) continue;
          uni.insert(toks[i].lemma);
          if (i + 1 < toks.size() && is_word_token(toks[i + 1])) {
            bi.insert(toks[i].lemma + " " + toks[i + 1].lemma);
          }
        }
      }
      for (const auto& t : uni) ++df.unigrams[t];
      for (const auto& t : bi) ++df.bigrams[t];
      ++df.n_docs;
    }
  }
  return df;
}

KeywordSet select_keywords(const text::AnalyzedThread& thread, const DocFreq& df,
                           std::size_t n_uni, std::size_t n_bi) {
  std::map<std::string, std::size_t> tf_uni, tf_bi;
  for (const auto& comment : thread.comments) {
    for (const auto& sent : comment.sentences) {
      const auto& toks = sent.tokens;
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (!is_word_token(toks[i])) continue;
        if (!text::is_stopword(toks[i].surface)) ++tf_uni[toks[i].lemma];
        if (i + 1 < toks.size() && is_word_token(toks[i + 1])) {
          ++tf_bi[toks[i].lemma + " " + toks[i + 1].lemma];
        }
      }
    }
  }

  auto rank = [&](const std::map<std::string, std::size_t>& tf,
                  const std::unordered_map<std::string, std::size_t>& doc_freq, std::size_t n) {
    std::vector<KeywordEntry> scored;
    for (const auto& [term, count] : tf) {
      auto it = doc_freq.find(term);
      const std::size_t d = it == doc_freq.end() ? 1 : std::max<std::size_t>(it->second, 1);
      const double idf = std::log(static_cast<double>(df.n_docs) / static_cast<double>(d));
      KeywordEntry e;
      std::size_t pos = term.find(' ');
      if (pos == std::string::npos) {
        e.terms = {term};
      } else {
        e.terms = {term.substr(0, pos), term.substr(pos + 1)};
      }
      e.score = static_cast<double>(count) * idf;
      scored.push_back(std::move(e));
    }
    std::sort(scored.begin(), scored.end(), [](const KeywordEntry& a, const KeywordEntry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.terms < b.terms;
    });
    if (scored.size() > n) scored.resize(n);
    return scored;
  };

  KeywordSet set;
  set.unigrams = rank(tf_uni, df.unigrams, n_uni);
  set.bigrams = rank(tf_bi, df.bigrams, n_bi);
  return set;
}

std::vector<SentenceRef> select_argumentative(const text::AnalyzedThread& thread,
                                              const KeywordSet& keywords) {
  std::set<std::string> uni;
  std::set<std::pair<std::string, std::string>> bi;
  for (const auto& e : keywords.unigrams) uni.insert(e.terms[0]);
  for (const auto& e : keywords.bigrams) bi.insert({e.terms[0], e.terms[1]});

  std::vector<SentenceRef> refs;
  for (std::size_t ci = 0; ci < thread.comments.size(); ++ci) {
    const auto& comment = thread.comments[ci];
    for (std::size_t si = 0; si < comment.sentences.size(); ++si) {
      const auto& toks = comment.sentences[si].tokens;
      bool hit = false;
      for (std::size_t i = 0; i < toks.size() && !hit; ++i) {
        if (!is_word_token(toks[i])) continue;
        if (uni.count(toks[i].lemma)) hit = true;
        if (!hit && i + 1 < toks.size() && is_word_token(toks[i + 1]) &&
            bi.count({toks[i].lemma, toks[i + 1].lemma})) {
          hit = true;
        }
      }
      if (hit) refs.push_back({comment.id, ci, si});
    }
  }
  return refs;
}

// ---------------------------------------------------------------------------
// Rules

namespace {

bool is_punct_token(const text::Token& tok) { return !is_word_token(tok); }

// [begin, end) of tokens trimmed of punctuation-only edges; empty when
// nothing remains
std::optional<text::Span> clause_span(std::span<const text::Token> toks, std::size_t begin,
                                      std::size_t end) {
  while (begin < end && is_punct_token(toks[begin])) ++begin;
  while (end > begin && is_punct_token(toks[end - 1])) --end;
  if (begin >= end) return std::nullopt;
  return text::Span{toks[begin].span.begin, toks[end - 1].span.end};
}

struct InitialMarker {
  std::size_t clause_begin;  // token index after the marker
  std::string rule;
};

const std::array<std::string_view, 6> kLeadSkip = {"and", "but", "so", "or", "yet", "well"};

std::optional<InitialMarker> match_initial(std::span<const text::Token> toks) {
  std::size_t i = 0;
  while (i < toks.size() &&
         (is_punct_token(toks[i]) ||
          std::find(kLeadSkip.begin(), kLeadSkip.end(), toks[i].surface) != kLeadSkip.end())) {
    ++i;
  }
  auto at = [&](std::size_t k, std::string_view w) {
    return k < toks.size() && toks[k].surface == w;
  };
  if (at(i, "i") && at(i + 1, "think") && at(i + 2, "that")) return InitialMarker{i + 3, "think"};
  if (at(i, "in") && at(i + 1, "my") && at(i + 2, "opinion")) return InitialMarker{i + 3, "opinion"};
  if (at(i, "i") && at(i + 1, "argue") && at(i + 2, "that")) return InitialMarker{i + 3, "argue"};
  return std::nullopt;
}

struct MedialSplit {
  std::size_t marker;  // token index of the marker
  std::string rule;
};

std::optional<MedialSplit> match_medial(std::span<const text::Token> toks, std::size_t begin,
                                        std::size_t end) {
  for (std::string_view marker : {"because", "so", "but"}) {
    for (std::size_t k = begin + 1; k + 1 < end; ++k) {
      if (toks[k].surface != marker) continue;
      return MedialSplit{k, std::string(marker)};
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<RuleMatch> apply_rules(const text::Sentence& sentence) {
  std::span<const text::Token> toks(sentence.tokens);
  std::vector<RuleMatch> out;
  if (toks.empty()) return out;

  const auto initial = match_initial(toks);
  const std::size_t region_begin = initial ? initial->clause_begin : 0;
  const std::size_t region_end = toks.size();
  if (region_begin >= region_end) return out;

  const auto medial = match_medial(toks, region_begin, region_end);
  std::optional<text::Span> left, right;
  if (medial) {
    left = clause_span(toks, region_begin, medial->marker);
    right = clause_span(toks, medial->marker + 1, region_end);
  }

  if (medial && left && right) {
    const std::string rule = initial ? initial->rule + "+" + medial->rule : medial->rule;
    if (medial->rule == "because") {
      out.push_back({ComponentKind::Claim, *left, rule});
      out.push_back({ComponentKind::Premise, *right, rule});
    } else if (medial->rule == "so") {
      out.push_back({ComponentKind::Claim, *right, rule});
      out.push_back({ComponentKind::Premise, *left, rule});
    } else {  // but
      if (initial) out.push_back({ComponentKind::Claim, *left, rule});
      out.push_back({ComponentKind::Premise, *right, rule});
    }
    return out;
  }

  if (initial) {
    if (auto span = clause_span(toks, region_begin, region_end)) {
      out.push_back({ComponentKind::Claim, *span, initial->rule});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

std::vector<std::string> collect_tagset(const text::AnalyzedThread& thread) {
  std::set<std::string> tags;
  for (const auto& comment : thread.comments) {
    for (const auto& sent : comment.sentences) {
      for (const auto& tok : sent.tokens) {
        if (!tok.pos.empty()) tags.insert(tok.pos);
      }
    }
  }
  return {tags.begin(), tags.end()};
}

std::vector<std::vector<double>> augmented_sequence(const Segment& segment,
                                                    const text::EmbeddingTable& table,
                                                    std::span<const std::string> tagset) {
  std::vector<std::vector<double>> seq;
  seq.reserve(segment.tokens.size());
  for (const auto& tok : segment.tokens) {
    std::vector<double> v = table.embed(tok.surface);
    v.resize(table.dim + tagset.size(), 0.0);
    auto it = std::find(tagset.begin(), tagset.end(), tok.pos);
    if (it != tagset.end()) {
      v[table.dim + static_cast<std::size_t>(it - tagset.begin())] = 1.0;
    }
    seq.push_back(std::move(v));
  }
  return seq;
}

namespace {

Segment make_segment(const text::AnalyzedComment& comment, const text::Sentence& sentence,
                     const text::Span& span) {
  Segment seg;
  seg.comment_id = comment.id;
  seg.span = span;
  for (const auto& tok : sentence.tokens) {
    if (tok.span.begin >= span.begin && tok.span.end <= span.end) seg.tokens.push_back(tok);
  }
  return seg;
}

// distance between two segments under the selected metric; DTW works on the
// POS-augmented sequences, the baselines on the token lists
struct MetricContext {
  Metric metric;
  const text::EmbeddingTable* table;
  const DocFreq* df;
  std::span<const std::string> tagset;

  double operator()(const Segment& a, const Segment& b) const {
    switch (metric) {
      case Metric::Dtw:
        return dtw_distance(augmented_sequence(a, *table, tagset),
                            augmented_sequence(b, *table, tagset));
      case Metric::Cosine:
        return cosine_distance(a.tokens, b.tokens, *table, *df);
      case Metric::Wmd:
        return wmd_distance(a.tokens, b.tokens, *table);
      case Metric::Kl:
        return kl_divergence(a.tokens, b.tokens);
    }
    return 0.0;
  }

  // KL is directional; intra-set statistics use the symmetrized mean
  double pair(const Segment& a, const Segment& b) const {
    if (metric == Metric::Kl) {
      return 0.5 * (kl_divergence(a.tokens, b.tokens) + kl_divergence(b.tokens, a.tokens));
    }
    return (*this)(a, b);
  }
};

// deterministic parallel map: results land by index regardless of schedule
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, std::size_t jobs, Fn&& fn) {
  std::vector<T> out(count);
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  const std::size_t workers = std::min(jobs, count);
  std::vector<std::future<void>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w]() {
      for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
    }));
  }
  for (auto& f : futures) f.get();
  return out;
}

}  // namespace

MineResult mine_thread(const text::AnalyzedThread& thread, const text::EmbeddingTable& table,
                       const DocFreq& df, const MinerConfig& config) {
  MineResult result;
  result.keywords = select_keywords(thread, df, config.n_uni, config.n_bi);
  const auto arg_sentences = select_argumentative(thread, result.keywords);
  result.argumentative_sentences = arg_sentences.size();

  std::vector<Segment> claim_seeds, premise_seeds;
  std::vector<SentenceRef> candidates;
  for (const auto& ref : arg_sentences) {
    const auto& comment = thread.comments[ref.comment_index];
    const auto& sentence = comment.sentences[ref.sentence_index];
    const auto matches = apply_rules(sentence);
    if (matches.empty()) {
      candidates.push_back(ref);
      continue;
    }
    for (const auto& m : matches) {
      ArgComponent c;
      c.comment_id = comment.id;
      c.start = m.span.begin;
      c.end = m.span.end;
      c.kind = m.kind;
      c.provenance = Provenance::Rule;
      c.matched_rule = m.rule;
      result.components.push_back(c);
      (m.kind == ComponentKind::Claim ? claim_seeds : premise_seeds)
          .push_back(make_segment(comment, sentence, m.span));
    }
  }

  if (claim_seeds.size() < 2 || premise_seeds.size() < 2) {
    result.diagnostics.push_back(
        "similarity expansion skipped: need >= 2 rule seeds per kind, found " +
        std::to_string(claim_seeds.size()) + " claim(s) and " +
        std::to_string(premise_seeds.size()) + " premise(s)");
    return result;
  }

  const std::vector<std::string> tagset =
      table.tagset.empty() ? collect_tagset(thread) : table.tagset;
  MetricContext metric{config.metric, &table, &df, tagset};

  auto pair_distances = [&](const std::vector<Segment>& seeds) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      for (std::size_t j = i + 1; j < seeds.size(); ++j) pairs.emplace_back(i, j);
    }
    return parallel_map<double>(pairs.size(), config.jobs, [&](std::size_t k) {
      return metric.pair(seeds[pairs[k].first], seeds[pairs[k].second]);
    });
  };
  const auto cd = pair_distances(claim_seeds);
  const auto pd = pair_distances(premise_seeds);
  std::size_t ci = 0, pi = 0;
  const SeedStats stats = seed_stats(
      claim_seeds.size(), premise_seeds.size(), [&](std::size_t, std::size_t) { return cd[ci++]; },
      [&](std::size_t, std::size_t) { return pd[pi++]; });

  std::vector<Segment> cand_segments;
  for (const auto& ref : candidates) {
    const auto& comment = thread.comments[ref.comment_index];
    const auto& sentence = comment.sentences[ref.sentence_index];
    if (auto span = clause_span(sentence.tokens, 0, sentence.tokens.size())) {
      cand_segments.push_back(make_segment(comment, sentence, *span));
    }
  }

  using Verdict = std::optional<std::pair<ComponentKind, double>>;
  const auto verdicts =
      parallel_map<Verdict>(cand_segments.size(), config.jobs, [&](std::size_t k) {
        double min_c = std::numeric_limits<double>::infinity();
        for (const auto& seed : claim_seeds) {
          min_c = std::min(min_c, metric(cand_segments[k], seed));
        }
        double min_e = std::numeric_limits<double>::infinity();
        for (const auto& seed : premise_seeds) {
          min_e = std::min(min_e, metric(cand_segments[k], seed));
        }
        return classify_segment(min_c, min_e, stats);
      });
  for (std::size_t k = 0; k < cand_segments.size(); ++k) {
    if (!verdicts[k]) continue;
    ArgComponent c;
    c.comment_id = cand_segments[k].comment_id;
    c.start = cand_segments[k].span.begin;
    c.end = cand_segments[k].span.end;
    c.kind = verdicts[k]->first;
    c.provenance = Provenance::Similarity;
    c.min_distance = verdicts[k]->second;
    result.components.push_back(c);
  }

  std::map<std::string, std::size_t> comment_order;
  for (std::size_t i = 0; i < thread.comments.size(); ++i) {
    comment_order[thread.comments[i].id] = i;
  }
  std::stable_sort(result.components.begin(), result.components.end(),
                   [&](const ArgComponent& a, const ArgComponent& b) {
                     const auto oa = comment_order[a.comment_id];
                     const auto ob = comment_order[b.comment_id];
                     if (oa != ob) return oa < ob;
                     if (a.start != b.start) return a.start < b.start;
                     return a.end < b.end;
                   });
  return result;
}

AttentionSelection attention_argumentative(const text::AnalyzedComment& comment,
                                           const persuasion::PersuasionModel& model,
                                           double threshold) {
  persuasion::EncodedComment encoded;
  encoded.id = comment.id;
  for (const auto& sent : comment.sentences) {
    persuasion::EncodedSentence es;
    for (const auto& tok : sent.tokens) {
      auto it = model.vocab.find(tok.surface);
      es.word_ids.push_back(it == model.vocab.end() ? -1 : static_cast<long>(it->second));
    }
    if (!es.word_ids.empty()) encoded.sentences.push_back(std::move(es));
  }

  AttentionSelection sel;
  if (encoded.sentences.empty()) return sel;
  sel.raw_weights = persuasion::encode_comment(model, encoded).second;
  if (sel.raw_weights.empty()) return sel;  // no-attention variant
  const double max_w = *std::max_element(sel.raw_weights.begin(), sel.raw_weights.end());
  for (std::size_t i = 0; i < sel.raw_weights.size(); ++i) {
    if (sel.raw_weights[i] >= threshold) sel.raw_selected.push_back(i);
    if (max_w > 0.0 && sel.raw_weights[i] / max_w >= threshold) sel.maxnorm_selected.push_back(i);
  }
  return sel;
}

}  // namespace deltamine::argmine
