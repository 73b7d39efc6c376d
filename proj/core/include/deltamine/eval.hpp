#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltamine/argminer.hpp"
#include "deltamine/corpus.hpp"
#include "deltamine/textprep.hpp"

namespace deltamine::eval {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf prf1(const std::vector<bool>& predictions, const std::vector<bool>& labels);

// rank-statistic AUC with tied scores averaged
double auc(const std::vector<double>& scores, const std::vector<bool>& labels);

// ---------------------------------------------------------------------------
// Comment ranking (predicted score vs karma), macro-averaged over threads.

struct RankedThread {
  std::string thread_id;
  std::vector<std::string> comment_ids;
  std::vector<double> predicted;
  std::vector<double> truth;
};

struct RankRow {
  std::size_t k = 0;
  double map = 0.0;
  std::optional<double> mrr;        // only k == 1
  std::optional<double> kendall;    // only k > 1
  std::size_t threads = 0;          // threads with >= k comments
};

// One row per k; threads with fewer than k comments are skipped for that k.
// Ties in either ranking break deterministically (score desc, id asc).
std::vector<RankRow> rank_metrics(std::span<const RankedThread> threads,
                                  std::span<const std::size_t> ks);

// Kendall tau-a between two orderings of the same items.
double kendall_tau(std::span<const std::size_t> ranking_a, std::span<const std::size_t> ranking_b);

// ---------------------------------------------------------------------------
// Chain-length report

struct ChainOutcome {
  std::size_t length = 0;
  bool predicted = false;
  bool label = false;
};

struct ChainLengthRow {
  std::size_t length = 0;
  std::size_t count = 0;
  Prf prf;
};

// One row per populated chain length, ascending.
std::vector<ChainLengthRow> chainwise_report(std::span<const ChainOutcome> outcomes);

// ---------------------------------------------------------------------------
// Argument-component span scoring

struct SpanMatchConfig {
  enum class Mode { Exact, TokenOverlap };
  Mode mode = Mode::TokenOverlap;
  double theta = 0.5;  // Jaccard overlap over token index sets
};

struct KindPrf {
  Prf claim;
  Prf premise;
};

// token spans per comment id, used to turn character spans into token sets
using TokenIndex = std::map<std::string, std::vector<text::Span>>;

TokenIndex build_token_index(std::span<const text::AnalyzedThread> threads);

// Greedy one-to-one matching by descending overlap; a predicted span matches
// an unmatched gold span of the same kind when exact or overlap >= theta.
KindPrf span_score(std::span<const argmine::ArgComponent> predicted,
                   const corpus::AnnotationMap& gold, const TokenIndex& tokens,
                   const SpanMatchConfig& config = {});

// ---------------------------------------------------------------------------
// Keyword sweep (argumentative-sentence selection vs sentence-level gold)

struct SweepRow {
  std::string ngram;  // "unigram" | "bigram"
  std::size_t cap = 0;
  Prf prf;
  bool precision_defined = true;
};

// Sweeps each n-gram type separately (the other cap held at 0) against
// sentences that intersect any gold span.
std::vector<SweepRow> keyword_sweep(std::span<const text::AnalyzedThread> threads,
                                    const corpus::AnnotationMap& gold, const argmine::DocFreq& df,
                                    std::span<const std::size_t> caps);

// ---------------------------------------------------------------------------
// Attention-threshold extraction vs sentence-level gold

struct AttentionRow {
  std::string mode;  // "raw" | "maxnorm"
  double threshold = 0.0;
  Prf prf;
};

// Sentences whose attention weight (raw and per-comment max-normalized)
// clears each threshold, scored against sentences intersecting a gold span.
std::vector<AttentionRow> attention_report(std::span<const text::AnalyzedThread> threads,
                                           const corpus::AnnotationMap& gold,
                                           const persuasion::PersuasionModel& model,
                                           std::span<const double> thresholds);

// ---------------------------------------------------------------------------
// Component/karma export

struct ComponentScoreRow {
  std::string comment_id;
  long karma = 0;  // clipped to [-50, 200]
  std::size_t claim_count = 0;
  std::size_t premise_count = 0;
  double weighted_fraction = 0.0;  // sentences with attention weight > 0.5
};

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
  bool defined = false;  // false when either side is constant
};

struct ComponentScoreReport {
  std::vector<ComponentScoreRow> rows;
  Correlation claim_corr, premise_corr, weighted_corr;  // against karma
};

ComponentScoreReport component_score_export(
    std::span<const text::AnalyzedComment> comments,
    std::span<const argmine::ArgComponent> components,
    const std::map<std::string, std::vector<double>>& attention_weights);

Correlation correlate(std::span<const double> x, std::span<const double> y);

}  // namespace deltamine::eval
