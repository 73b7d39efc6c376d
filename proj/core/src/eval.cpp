#include "deltamine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace deltamine::eval {

Prf prf1(const std::vector<bool>& predictions, const std::vector<bool>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prf1: prediction/label size mismatch");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] && labels[i]) ++tp;
    if (predictions[i] && !labels[i]) ++fp;
    if (!predictions[i] && labels[i]) ++fn;
  }
  Prf out;
  out.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  out.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

double auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // midrank over ties
  std::vector<double> rank(scores.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k]) {
      pos_rank_sum += rank[k];
      ++n_pos;
    }
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  return (pos_rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

// indices 0..n-1 ordered by score desc, id asc
std::vector<std::size_t> ordering(const std::vector<double>& scores,
                                  const std::vector<std::string>& ids) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  return order;
}

}  // namespace

double kendall_tau(std::span<const std::size_t> ranking_a,
                   std::span<const std::size_t> ranking_b) {
  if (ranking_a.size() != ranking_b.size() || ranking_a.size() < 2) {
    throw std::invalid_argument("kendall_tau: need two rankings of the same length >= 2");
  }
  const std::size_t n = ranking_a.size();
  std::map<std::size_t, std::size_t> pos_b;
  for (std::size_t i = 0; i < n; ++i) pos_b[ranking_b[i]] = i;
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto bi = pos_b.at(ranking_a[i]);
      const auto bj = pos_b.at(ranking_a[j]);
      (bi < bj ? concordant : discordant)++;
    }
  }
  const double pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
  return (static_cast<double>(concordant) - static_cast<double>(discordant)) / pairs;
}

std::vector<RankRow> rank_metrics(std::span<const RankedThread> threads,
                                  std::span<const std::size_t> ks) {
  std::vector<RankRow> rows;
  for (std::size_t k : ks) {
    RankRow row;
    row.k = k;
    double map_sum = 0.0, mrr_sum = 0.0, tau_sum = 0.0;
    for (const auto& t : threads) {
      if (t.predicted.size() < k || k == 0) continue;
      const auto pred_order = ordering(t.predicted, t.comment_ids);
      const auto true_order = ordering(t.truth, t.comment_ids);
      ++row.threads;

      // relevant = true top-k
      std::set<std::size_t> relevant(true_order.begin(),
                                     true_order.begin() + static_cast<std::ptrdiff_t>(k));
      double hits = 0.0, ap = 0.0;
      for (std::size_t r = 0; r < pred_order.size(); ++r) {
        if (relevant.count(pred_order[r])) {
          hits += 1.0;
          ap += hits / (static_cast<double>(r) + 1.0);
        }
      }
      map_sum += ap / static_cast<double>(k);

      if (k == 1) {
        for (std::size_t r = 0; r < pred_order.size(); ++r) {
          if (pred_order[r] == true_order[0]) {
            mrr_sum += 1.0 / (static_cast<double>(r) + 1.0);
            break;
          }
        }
      } else {
        // order of the true top-k under each ranking
        std::vector<std::size_t> top(true_order.begin(),
                                     true_order.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<std::size_t> pred_top;
        for (std::size_t idx : pred_order) {
          if (relevant.count(idx)) pred_top.push_back(idx);
        }
        tau_sum += kendall_tau(pred_top, top);
      }
    }
    if (row.threads > 0) {
      row.map = map_sum / static_cast<double>(row.threads);
      if (k == 1) {
        row.mrr = mrr_sum / static_cast<double>(row.threads);
      } else {
        row.kendall = tau_sum / static_cast<double>(row.threads);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ChainLengthRow> chainwise_report(std::span<const ChainOutcome> outcomes) {
  std::map<std::size_t, std::pair<std::vector<bool>, std::vector<bool>>> groups;
  for (const auto& o : outcomes) {
    groups[o.length].first.push_back(o.predicted);
    groups[o.length].second.push_back(o.label);
  }
  std::vector<ChainLengthRow> rows;
  for (const auto& [length, pl] : groups) {
    ChainLengthRow row;
    row.length = length;
    row.count = pl.first.size();
    row.prf = prf1(pl.first, pl.second);
    rows.push_back(row);
  }
  return rows;
}

TokenIndex build_token_index(std::span<const text::AnalyzedThread> threads) {
  TokenIndex index;
  for (const auto& t : threads) {
    for (const auto& c : t.comments) {
      auto& spans = index[c.id];
      for (const auto& s : c.sentences) {
        for (const auto& tok : s.tokens) spans.push_back(tok.span);
      }
    }
  }
  return index;
}

namespace {

std::vector<std::size_t> covered_tokens(const std::vector<text::Span>& tokens, std::size_t start,
                                        std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].begin < end && start < tokens[i].end) out.push_back(i);
  }
  return out;
}

double jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Prf score_kind(std::span<const argmine::ArgComponent> predicted,
               const corpus::AnnotationMap& gold, const TokenIndex& tokens,
               const SpanMatchConfig& config, corpus::ComponentKind kind) {
  struct Gold {
    std::string comment_id;
    std::size_t start, end;
  };
  std::vector<Gold> gold_spans;
  for (const auto& [id, set] : gold) {
    for (const auto& s : set.spans) {
      if (s.kind == kind) gold_spans.push_back({id, s.start, s.end});
    }
  }
  std::vector<const argmine::ArgComponent*> preds;
  for (const auto& p : predicted) {
    if (p.kind == kind) preds.push_back(&p);
  }

  struct Candidate {
    double overlap;
    std::size_t pred, gold;
  };
  std::vector<Candidate> candidates;
  static const std::vector<text::Span> kNoTokens;
  for (std::size_t pi = 0; pi < preds.size(); ++pi) {
    for (std::size_t gi = 0; gi < gold_spans.size(); ++gi) {
      if (preds[pi]->comment_id != gold_spans[gi].comment_id) continue;
      const bool exact = preds[pi]->start == gold_spans[gi].start &&
                         preds[pi]->end == gold_spans[gi].end;
      if (config.mode == SpanMatchConfig::Mode::Exact) {
        if (exact) candidates.push_back({1.0, pi, gi});
        continue;
      }
      auto it = tokens.find(preds[pi]->comment_id);
      const auto& token_spans = it == tokens.end() ? kNoTokens : it->second;
      const double ov = exact ? 1.0
                              : jaccard(covered_tokens(token_spans, preds[pi]->start,
                                                       preds[pi]->end),
                                        covered_tokens(token_spans, gold_spans[gi].start,
                                                       gold_spans[gi].end));
      if (ov >= config.theta) candidates.push_back({ov, pi, gi});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gold < b.gold;
  });
  std::vector<bool> pred_used(preds.size(), false), gold_used(gold_spans.size(), false);
  std::size_t tp = 0;
  for (const auto& c : candidates) {
    if (pred_used[c.pred] || gold_used[c.gold]) continue;
    pred_used[c.pred] = true;
    gold_used[c.gold] = true;
    ++tp;
  }
  Prf out;
  out.precision = preds.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(preds.size());
  out.recall = gold_spans.empty() ? 0.0
                                  : static_cast<double>(tp) / static_cast<double>(gold_spans.size());
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

}  // namespace

KindPrf span_score(std::span<const argmine::ArgComponent> predicted,
                   const corpus::AnnotationMap& gold, const TokenIndex& tokens,
                   const SpanMatchConfig& config) {
  KindPrf out;
  out.claim = score_kind(predicted, gold, tokens, config, corpus::ComponentKind::Claim);
  out.premise = score_kind(predicted, gold, tokens, config, corpus::ComponentKind::Premise);
  return out;
}

std::vector<SweepRow> keyword_sweep(std::span<const text::AnalyzedThread> threads,
                                    const corpus::AnnotationMap& gold, const argmine::DocFreq& df,
                                    std::span<const std::size_t> caps) {
  // a sentence is gold-argumentative when it intersects any gold span
  auto sentence_gold = [&](const text::AnalyzedComment& comment, const text::Sentence& s) {
    auto it = gold.find(comment.id);
    if (it == gold.end()) return false;
    for (const auto& span : it->second.spans) {
      if (span.start < s.span.end && s.span.begin < span.end) return true;
    }
    return false;
  };

  std::vector<SweepRow> rows;
  for (const std::string& ngram : {std::string("unigram"), std::string("bigram")}) {
    for (std::size_t cap : caps) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (const auto& thread : threads) {
        const auto keywords =
            argmine::select_keywords(thread, df, ngram == "unigram" ? cap : 0,
                                     ngram == "bigram" ? cap : 0);
        const auto selected = argmine::select_argumentative(thread, keywords);
        std::set<std::pair<std::size_t, std::size_t>> picked;
        for (const auto& ref : selected) picked.insert({ref.comment_index, ref.sentence_index});
        for (std::size_t ci = 0; ci < thread.comments.size(); ++ci) {
          const auto& comment = thread.comments[ci];
          for (std::size_t si = 0; si < comment.sentences.size(); ++si) {
            const bool is_gold = sentence_gold(comment, comment.sentences[si]);
            const bool is_picked = picked.count({ci, si}) > 0;
            if (is_picked && is_gold) ++tp;
            if (is_picked && !is_gold) ++fp;
            if (!is_picked && is_gold) ++fn;
          }
        }
      }
      SweepRow row;
      row.ngram = ngram;
      row.cap = cap;
      row.precision_defined = tp + fp > 0;
      row.prf.precision =
          row.precision_defined ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
      row.prf.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
      row.prf.f1 = row.prf.precision + row.prf.recall == 0.0
                       ? 0.0
                       : 2.0 * row.prf.precision * row.prf.recall /
                             (row.prf.precision + row.prf.recall);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<AttentionRow> attention_report(std::span<const text::AnalyzedThread> threads,
                                           const corpus::AnnotationMap& gold,
                                           const persuasion::PersuasionModel& model,
                                           std::span<const double> thresholds) {
  auto sentence_gold = [&](const text::AnalyzedComment& comment, const text::Sentence& s) {
    auto it = gold.find(comment.id);
    if (it == gold.end()) return false;
    for (const auto& span : it->second.spans) {
      if (span.start < s.span.end && s.span.begin < span.end) return true;
    }
    return false;
  };

  std::vector<AttentionRow> rows;
  for (const std::string& mode : {std::string("raw"), std::string("maxnorm")}) {
    for (double threshold : thresholds) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (const auto& thread : threads) {
        for (const auto& comment : thread.comments) {
          if (comment.sentences.empty()) continue;
          auto sel = argmine::attention_argumentative(comment, model, threshold);
          const auto& picked = mode == "raw" ? sel.raw_selected : sel.maxnorm_selected;
          for (std::size_t si = 0; si < comment.sentences.size(); ++si) {
            const bool is_gold = sentence_gold(comment, comment.sentences[si]);
            const bool is_picked =
                std::find(picked.begin(), picked.end(), si) != picked.end();
            if (is_picked && is_gold) ++tp;
            if (is_picked && !is_gold) ++fp;
            if (!is_picked && is_gold) ++fn;
          }
        }
      }
      AttentionRow row;
      row.mode = mode;
      row.threshold = threshold;
      row.prf.precision =
          tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
      row.prf.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
      row.prf.f1 = row.prf.precision + row.prf.recall == 0.0
                       ? 0.0
                       : 2.0 * row.prf.precision * row.prf.recall /
                             (row.prf.precision + row.prf.recall);
      rows.push_back(row);
    }
  }
  return rows;
}

Correlation correlate(std::span<const double> x, std::span<const double> y) {
  Correlation out;
  if (x.size() != y.size() || x.size() < 2) return out;
  auto pearson = [](std::span<const double> a, std::span<const double> b) -> std::optional<double> {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      cov += (a[i] - ma) * (b[i] - mb);
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return std::nullopt;
    return cov / std::sqrt(va * vb);
  };
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
      i = j + 1;
    }
    return r;
  };
  const auto p = pearson(x, y);
  if (!p) return out;
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const auto s = pearson(rx, ry);
  if (!s) return out;
  out.pearson = *p;
  out.spearman = *s;
  out.defined = true;
  return out;
}

ComponentScoreReport component_score_export(
    std::span<const text::AnalyzedComment> comments,
    std::span<const argmine::ArgComponent> components,
    const std::map<std::string, std::vector<double>>& attention_weights) {
  ComponentScoreReport report;
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // id -> (claims, premises)
  for (const auto& c : components) {
    auto& entry = counts[c.comment_id];
    if (c.kind == corpus::ComponentKind::Claim) {
      ++entry.first;
    } else {
      ++entry.second;
    }
  }
  std::vector<double> karma, claims, premises, weighted;
  for (const auto& comment : comments) {
    ComponentScoreRow row;
    row.comment_id = comment.id;
    row.karma = std::clamp(comment.karma, -50L, 200L);
    if (auto it = counts.find(comment.id); it != counts.end()) {
      row.claim_count = it->second.first;
      row.premise_count = it->second.second;
    }
    if (auto it = attention_weights.find(comment.id); it != attention_weights.end()) {
      std::size_t above = 0;
      for (double w : it->second) {
        if (w > 0.5) ++above;
      }
      row.weighted_fraction = it->second.empty()
                                  ? 0.0
                                  : static_cast<double>(above) /
                                        static_cast<double>(it->second.size());
    }
    karma.push_back(static_cast<double>(row.karma));
    claims.push_back(static_cast<double>(row.claim_count));
    premises.push_back(static_cast<double>(row.premise_count));
    weighted.push_back(row.weighted_fraction);
    report.rows.push_back(std::move(row));
  }
  report.claim_corr = correlate(karma, claims);
  report.premise_corr = correlate(karma, premises);
  report.weighted_corr = correlate(karma, weighted);
  return report;
}

}  // namespace deltamine::eval
