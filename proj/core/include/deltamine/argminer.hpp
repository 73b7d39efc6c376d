#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "deltamine/corpus.hpp"
#include "deltamine/persuasion.hpp"
#include "deltamine/textprep.hpp"

namespace deltamine::argmine {

using corpus::ComponentKind;

enum class Provenance { Rule, Similarity };
enum class Metric { Dtw, Cosine, Wmd, Kl };

std::string to_string(Provenance p);
std::string to_string(Metric m);
Metric metric_from(const std::string& s);

struct ArgComponent {
  std::string comment_id;
  std::size_t start = 0;  // code-point offsets into the comment body
  std::size_t end = 0;
  ComponentKind kind = ComponentKind::Claim;
  Provenance provenance = Provenance::Rule;
  std::string matched_rule;                // set when provenance == Rule
  std::optional<double> min_distance;      // set when provenance == Similarity

  bool operator==(const ArgComponent&) const = default;
};

// ---------------------------------------------------------------------------
// Keyword gating

struct KeywordEntry {
  std::vector<std::string> terms;  // 1 for unigrams, 2 for bigrams (lemmas)
  double score = 0.0;
};

struct KeywordSet {
  std::vector<KeywordEntry> unigrams;  // scores non-increasing
  std::vector<KeywordEntry> bigrams;
};

// Comment-level document frequencies over the whole corpus (document = one
// comment). Terms are lemmas; bigrams are adjacent word-token lemma pairs.
struct DocFreq {
  std::size_t n_docs = 0;
  std::unordered_map<std::string, std::size_t> unigrams;
  std::unordered_map<std::string, std::size_t> bigrams;

  static DocFreq build(std::span<const text::AnalyzedThread> threads);
  double idf_unigram(const std::string& lemma) const;
};

// Top-n thread terms by tf(term, thread) * ln(N/df), ties broken
// lexicographically; stopwords are excluded from unigrams.
KeywordSet select_keywords(const text::AnalyzedThread& thread, const DocFreq& df,
                           std::size_t n_uni = 7, std::size_t n_bi = 3);

struct SentenceRef {
  std::string comment_id;
  std::size_t comment_index = 0;
  std::size_t sentence_index = 0;

  bool operator==(const SentenceRef&) const = default;
};

// Sentences containing at least one keyword; bigrams must appear as adjacent
// tokens.
std::vector<SentenceRef> select_argumentative(const text::AnalyzedThread& thread,
                                              const KeywordSet& keywords);

// ---------------------------------------------------------------------------
// Discourse-marker rules

struct RuleMatch {
  ComponentKind kind = ComponentKind::Claim;
  text::Span span;  // clause span, marker excluded, edges trimmed
  std::string rule;
};

// The six rules in order: "I think that" / "In my opinion," / "I argue that"
// (sentence-initial, leading conjunctions allowed) -> claim; "X because Y" ->
// claim(X)+premise(Y); "X so Y" -> claim(Y)+premise(X); "X but Y" ->
// premise(Y). The first rule whose marker occurs wins, at its first
// occurrence.
std::vector<RuleMatch> apply_rules(const text::Sentence& sentence);

// ---------------------------------------------------------------------------
// Distances

// Warping-path distance between two vector sequences: cell cost is the
// squared Euclidean distance, the first row/column accumulate along the
// edge, and the result is the square root of the final cell.
double dtw_distance(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b);

// cosine distance (1 - similarity) between tf-idf-weighted mean word vectors
double cosine_distance(std::span<const text::Token> a, std::span<const text::Token> b,
                       const text::EmbeddingTable& table, const DocFreq& df);

// exact optimal transport between L1-normalized bags of words with Euclidean
// word-vector ground costs
double wmd_distance(std::span<const text::Token> a, std::span<const text::Token> b,
                    const text::EmbeddingTable& table);

// KL(a || b) over the union vocabulary with additive smoothing
double kl_divergence(std::span<const text::Token> a, std::span<const text::Token> b,
                     double alpha = 0.5);

// ---------------------------------------------------------------------------
// Semi-supervised expansion

struct Segment {
  std::string comment_id;
  text::Span span;
  std::vector<text::Token> tokens;
};

std::vector<std::string> collect_tagset(const text::AnalyzedThread& thread);

std::vector<std::vector<double>> augmented_sequence(const Segment& segment,
                                                    const text::EmbeddingTable& table,
                                                    std::span<const std::string> tagset);

struct SeedStats {
  double d_c = 0.0, d_e = 0.0;  // mean intra-set distances
  double s_c = 0.0, s_e = 0.0;  // population standard deviations
  std::size_t n_c = 0, n_e = 0;  // unique pair counts k(k-1)/2
  bool claim_ok = false, premise_ok = false;  // false when the set has < 2 seeds
};

using PairDistanceFn = std::function<double(std::size_t, std::size_t)>;

// Population mean/stddev over all unordered distinct pairs of each seed set.
SeedStats seed_stats(std::size_t n_claim_seeds, std::size_t n_premise_seeds,
                     const PairDistanceFn& claim_dist, const PairDistanceFn& premise_dist);

// Threshold test plus the normalized-margin tie-break: eligible for a kind
// when the min distance to its seeds is <= that set's mean; on a tie the
// side with the larger (mean - min)/stddev wins, a zero stddev counting as
// infinitely typical (both degenerate -> claim).
std::optional<std::pair<ComponentKind, double>> classify_segment(double min_claim,
                                                                 double min_premise,
                                                                 const SeedStats& stats);

struct MinerConfig {
  std::size_t n_uni = 7;
  std::size_t n_bi = 3;
  Metric metric = Metric::Dtw;
  std::size_t jobs = 1;  // parallel pairwise distances; results reduce deterministically
};

struct MineResult {
  std::vector<ArgComponent> components;
  std::vector<std::string> diagnostics;
  KeywordSet keywords;
  std::size_t argumentative_sentences = 0;
};

// Full pipeline: keywords -> argumentative sentences -> rule seeds -> seed
// statistics -> similarity closure. Falls back to rule-only output with a
// diagnostic when either seed set has fewer than 2 segments.
MineResult mine_thread(const text::AnalyzedThread& thread, const text::EmbeddingTable& table,
                       const DocFreq& df, const MinerConfig& config = {});

// ---------------------------------------------------------------------------
// Attention-derived argumentative sentences

struct AttentionSelection {
  std::vector<double> raw_weights;              // one per encoded sentence
  std::vector<std::size_t> raw_selected;        // raw weight >= threshold
  std::vector<std::size_t> maxnorm_selected;    // weight / max weight >= threshold
};

AttentionSelection attention_argumentative(const text::AnalyzedComment& comment,
                                           const persuasion::PersuasionModel& model,
                                           double threshold);

}  // namespace deltamine::argmine
