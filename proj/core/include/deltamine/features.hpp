#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "deltamine/textprep.hpp"

namespace deltamine::persuasion {

// word -> +1 / -1 / 0 read from a lexicon file of "word label" lines with
// label in {positive, negative, neutral}; '#' starts a comment.
struct PolarityLexicon {
  std::unordered_map<std::string, int> polarity;
  static PolarityLexicon load(const std::filesystem::path& path);
};

// corpus-level term set for the cumulative-entropy feature: unique
// lemmatized non-stopword word terms. A restored count stands in for the
// full set when only |T| was persisted.
struct CorpusTermStats {
  std::unordered_set<std::string> terms;
  std::optional<std::size_t> term_count;
  std::size_t unique_terms() const { return term_count ? *term_count : terms.size(); }
  static CorpusTermStats build(std::span<const text::AnalyzedComment> comments);
};

struct CommentFeatures {
  std::map<std::string, std::size_t> pos_bigrams;
  std::map<std::string, std::size_t> pos_trigrams;
  std::size_t positive = 0, negative = 0, neutral = 0;
  std::size_t word_count = 0;
  std::size_t sentence_count = 0;
  double cumulative_entropy = 0.0;
  double fog_index = 0.0;
};

// H_c = (1/|T|) * sum over unique terms t of tf_t * (ln|T| - ln tf_t);
// FOG = 0.4 * (words/sentences + 100 * complex_words/words), a word being
// complex with >= 3 vowel-group syllables.
CommentFeatures extract_features(const text::AnalyzedComment& comment,
                                 const CorpusTermStats& stats, const PolarityLexicon& lexicon);

std::size_t syllable_count(std::string_view word);

// Fixed-length vectorization for the feature-based model: the top POS
// bigrams/trigrams by corpus frequency plus the scalar features, z-scored
// with statistics frozen at build time.
class FeatureSpace {
 public:
  static FeatureSpace build(std::span<const text::AnalyzedComment> comments,
                            const CorpusTermStats& stats, const PolarityLexicon& lexicon,
                            std::size_t top_bigrams = 24, std::size_t top_trigrams = 24);
  // rebuild from persisted parts (see the tool's feature_space.json)
  static FeatureSpace restore(std::vector<std::string> bigrams,
                              std::vector<std::string> trigrams, std::vector<double> mean,
                              std::vector<double> stddev);

  std::vector<double> vectorize(const CommentFeatures& f) const;
  std::size_t dim() const { return bigram_keys_.size() + trigram_keys_.size() + 7; }

  const std::vector<std::string>& bigram_keys() const { return bigram_keys_; }
  const std::vector<std::string>& trigram_keys() const { return trigram_keys_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }

 private:
  std::vector<double> raw_vector(const CommentFeatures& f) const;
  std::vector<std::string> bigram_keys_;
  std::vector<std::string> trigram_keys_;
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

}  // namespace deltamine::persuasion
