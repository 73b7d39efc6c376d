#include "deltamine/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace deltamine::persuasion {

namespace {

bool is_word_token(const text::Token& tok) {
  for (unsigned char c : tok.surface) {
    if (std::isalnum(c) || c >= 0x80) return true;
  }
  return false;
}

}  // namespace

PolarityLexicon PolarityLexicon::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("lexicon: cannot open " + path.string());
  PolarityLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word, label;
    if (!(ls >> word)) continue;
    if (!(ls >> label)) {
      throw std::runtime_error("lexicon line " + std::to_string(line_no) + ": missing label");
    }
    int value;
    if (label == "positive") {
      value = 1;
    } else if (label == "negative") {
      value = -1;
    } else if (label == "neutral") {
      value = 0;
    } else {
      throw std::runtime_error("lexicon line " + std::to_string(line_no) + ": unknown label '" +
                               label + "'");
    }
    lex.polarity[word] = value;
  }
  return lex;
}

CorpusTermStats CorpusTermStats::build(std::span<const text::AnalyzedComment> comments) {
  CorpusTermStats stats;
  for (const auto& comment : comments) {
    for (const auto& sent : comment.sentences) {
      for (const auto& tok : sent.tokens) {
        if (!is_word_token(tok) || text::is_stopword(tok.surface)) continue;
        stats.terms.insert(tok.lemma);
      }
    }
  }
  return stats;
}

std::size_t syllable_count(std::string_view word) {
  auto is_vowel = [](char c) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : word) {
    if (is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  return groups;
}

CommentFeatures extract_features(const text::AnalyzedComment& comment,
                                 const CorpusTermStats& stats, const PolarityLexicon& lexicon) {
  if (stats.unique_terms() == 0) {
    throw std::invalid_argument("extract_features: empty corpus term set");
  }
  CommentFeatures f;
  f.sentence_count = comment.sentences.size();

  std::map<std::string, std::size_t> tf;
  std::size_t complex_words = 0;
  for (const auto& sent : comment.sentences) {
    // POS n-grams over the tag sequence of the sentence
    const auto& toks = sent.tokens;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      ++f.pos_bigrams[toks[i].pos + " " + toks[i + 1].pos];
      if (i + 2 < toks.size()) {
        ++f.pos_trigrams[toks[i].pos + " " + toks[i + 1].pos + " " + toks[i + 2].pos];
      }
    }
    for (const auto& tok : toks) {
      if (!is_word_token(tok)) continue;
      ++f.word_count;
      if (syllable_count(tok.surface) >= 3) ++complex_words;
      if (auto it = lexicon.polarity.find(tok.surface); it != lexicon.polarity.end()) {
        if (it->second > 0) {
          ++f.positive;
        } else if (it->second < 0) {
          ++f.negative;
        } else {
          ++f.neutral;
        }
      }
      if (!text::is_stopword(tok.surface)) ++tf[tok.lemma];
    }
  }

  const double log_t = std::log(static_cast<double>(stats.unique_terms()));
  double h = 0.0;
  for (const auto& [term, count] : tf) {
    (void)term;
    h += static_cast<double>(count) * (log_t - std::log(static_cast<double>(count)));
  }
  f.cumulative_entropy = h / static_cast<double>(stats.unique_terms());

  if (f.word_count > 0 && f.sentence_count > 0) {
    f.fog_index = 0.4 * (static_cast<double>(f.word_count) / static_cast<double>(f.sentence_count) +
                         100.0 * static_cast<double>(complex_words) /
                             static_cast<double>(f.word_count));
  }
  return f;
}

FeatureSpace FeatureSpace::build(std::span<const text::AnalyzedComment> comments,
                                 const CorpusTermStats& stats, const PolarityLexicon& lexicon,
                                 std::size_t top_bigrams, std::size_t top_trigrams) {
  std::map<std::string, std::size_t> bi_counts, tri_counts;
  std::vector<CommentFeatures> all;
  all.reserve(comments.size());
  for (const auto& comment : comments) {
    CommentFeatures f = extract_features(comment, stats, lexicon);
    for (const auto& [k, v] : f.pos_bigrams) bi_counts[k] += v;
    for (const auto& [k, v] : f.pos_trigrams) tri_counts[k] += v;
    all.push_back(std::move(f));
  }

  auto top_keys = [](const std::map<std::string, std::size_t>& counts, std::size_t n) {
    std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < std::min(n, items.size()); ++i) keys.push_back(items[i].first);
    return keys;
  };

  FeatureSpace space;
  space.bigram_keys_ = top_keys(bi_counts, top_bigrams);
  space.trigram_keys_ = top_keys(tri_counts, top_trigrams);

  const std::size_t d = space.dim();
  space.mean_.assign(d, 0.0);
  space.stddev_.assign(d, 1.0);
  if (!all.empty()) {
    std::vector<std::vector<double>> raws;
    raws.reserve(all.size());
    for (const auto& f : all) raws.push_back(space.raw_vector(f));
    for (std::size_t j = 0; j < d; ++j) {
      double sum = 0.0;
      for (const auto& r : raws) sum += r[j];
      space.mean_[j] = sum / static_cast<double>(raws.size());
      double var = 0.0;
      for (const auto& r : raws) {
        const double diff = r[j] - space.mean_[j];
        var += diff * diff;
      }
      const double sd = std::sqrt(var / static_cast<double>(raws.size()));
      space.stddev_[j] = sd < 1e-12 ? 1.0 : sd;
    }
  }
  return space;
}

FeatureSpace FeatureSpace::restore(std::vector<std::string> bigrams,
                                   std::vector<std::string> trigrams, std::vector<double> mean,
                                   std::vector<double> stddev) {
  FeatureSpace space;
  space.bigram_keys_ = std::move(bigrams);
  space.trigram_keys_ = std::move(trigrams);
  if (mean.size() != space.dim() || stddev.size() != space.dim()) {
    throw std::invalid_argument("feature space: mean/stddev length does not match the layout");
  }
  space.mean_ = std::move(mean);
  space.stddev_ = std::move(stddev);
  return space;
}

std::vector<double> FeatureSpace::raw_vector(const CommentFeatures& f) const {
  std::vector<double> v;
  v.reserve(dim());
  for (const auto& k : bigram_keys_) {
    auto it = f.pos_bigrams.find(k);
    v.push_back(it == f.pos_bigrams.end() ? 0.0 : static_cast<double>(it->second));
  }
  for (const auto& k : trigram_keys_) {
    auto it = f.pos_trigrams.find(k);
    v.push_back(it == f.pos_trigrams.end() ? 0.0 : static_cast<double>(it->second));
  }
  v.push_back(static_cast<double>(f.positive));
  v.push_back(static_cast<double>(f.negative));
  v.push_back(static_cast<double>(f.neutral));
  v.push_back(static_cast<double>(f.word_count));
  v.push_back(static_cast<double>(f.sentence_count));
  v.push_back(f.cumulative_entropy);
  v.push_back(f.fog_index);
  return v;
}

std::vector<double> FeatureSpace::vectorize(const CommentFeatures& f) const {
  std::vector<double> v = raw_vector(f);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = (v[j] - mean_[j]) / stddev_[j];
  return v;
}

}  // namespace deltamine::persuasion
