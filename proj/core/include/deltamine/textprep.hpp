#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deltamine/corpus.hpp"
#include "deltamine/rng.hpp"

namespace deltamine::text {

// All character offsets are Unicode scalar-value (code point) indices.
std::u32string utf8_decode(std::string_view utf8);
std::string utf8_encode(std::u32string_view text);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open
  bool operator==(const Span&) const = default;
};

struct Token {
  std::string surface;  // lowercased for embedding lookup
  std::string lemma;
  std::string pos;  // empty until tagged
  Span span;
};

struct Sentence {
  Span span;
  std::vector<Token> tokens;
  std::optional<double> attention_weight;  // populated after model inference
};

// Rule-based splitting on terminal punctuation with an abbreviation guard;
// the returned spans cover the whole text in order.
std::vector<Span> split_sentences(const std::u32string& text);
std::vector<Span> split_sentences(std::string_view utf8);

// Word/punctuation tokens with code-point offsets; contractions such as
// "don't" split into "do" + "n't". POS fields are left empty.
std::vector<Token> tokenize(const std::u32string& text, std::size_t offset = 0);
std::vector<Token> tokenize(std::string_view utf8);

// Suffix-stripping lemma used by keyword and entropy features.
std::string lemma_of(std::string_view lowercased);

bool is_stopword(std::string_view word);
std::span<const std::string_view> stopword_list();
std::uint64_t stopword_list_hash();  // FNV-1a of the newline-joined list

// ---------------------------------------------------------------------------
// POS tagging

// Greedy averaged-perceptron tagger over Penn Treebank tags. Training data
// is one sentence per line, space-separated "token_tag" pairs. Tokens that
// already carry a tag are passed through untouched; words the model has
// never seen still get a tag from suffix/shape features.
class PosTagger {
 public:
  void train(const std::vector<std::vector<std::pair<std::string, std::string>>>& sentences,
             int iterations = 8, std::uint64_t seed = 1);

  void tag(std::vector<Token>& sentence) const;
  std::vector<std::string> tag_words(const std::vector<std::string>& words) const;

  bool trained() const { return !tags_.empty(); }
  const std::vector<std::string>& tagset() const { return tags_; }

  static PosTagger train_from_file(const std::filesystem::path& sample);
  static std::vector<std::vector<std::pair<std::string, std::string>>> load_sample(
      const std::filesystem::path& sample);

 private:
  std::string predict(const std::string& word, const std::string& prev_tag) const;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::vector<double>> weights_;  // feature -> per-tag score
};

// Heuristic tag for a single word, used when no trained model is available.
std::string fallback_tag(std::string_view word);

// Applies pass-through / model / fallback tagging in that order.
void pos_tag(std::vector<Token>& sentence, const PosTagger* tagger = nullptr);

// ---------------------------------------------------------------------------
// Embeddings

enum class OovPolicy { ZeroVector, HashedBucket };

struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::string> words;                      // index -> word
  std::unordered_map<std::string, std::size_t> vocab;  // word -> index
  std::vector<double> vectors;                         // row-major |vocab| x dim
  std::vector<std::string> tagset;                     // ordered; one-hot width
  OovPolicy oov_policy = OovPolicy::ZeroVector;

  std::span<const double> vector_at(std::size_t index) const;
  std::optional<std::size_t> lookup(std::string_view word) const;
  // Embedding of `word` under the OOV policy (zero vector or hashed bucket).
  std::vector<double> embed(std::string_view word) const;
  std::size_t augmented_dim() const { return dim + tagset.size(); }
};

struct SkipgramConfig {
  std::size_t dim = 50;
  std::size_t epochs = 25;
  std::size_t window = 5;
  std::size_t negatives = 5;
  double lr = 0.025;
  std::uint64_t seed = 1;
};

// Skip-gram with negative sampling, unigram^0.75 negative distribution,
// single-threaded and bit-deterministic for a given seed. When
// `epoch_losses` is non-null it receives the mean objective per epoch.
EmbeddingTable train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const SkipgramConfig& config,
                              std::vector<double>* epoch_losses = nullptr);

EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

// Embedding (or OOV vector) concatenated with the one-hot POS indicator.
std::vector<double> augment(const Token& token, const EmbeddingTable& table);

double cosine(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Analyzed text: the working representation shared by the model and miner.

struct AnalyzedComment {
  std::string id;
  std::string body;
  long karma = 0;
  bool delta_awarded = false;
  std::vector<Sentence> sentences;
};

AnalyzedComment analyze_comment(const std::string& id, const std::string& body,
                                long karma, bool delta_awarded,
                                const PosTagger* tagger = nullptr);

struct AnalyzedThread {
  std::string thread_id;
  std::vector<AnalyzedComment> comments;
};

AnalyzedThread analyze_thread(const corpus::Thread& thread, const PosTagger* tagger = nullptr);
std::vector<AnalyzedThread> analyze_threads(std::span<const corpus::Thread> threads,
                                            const PosTagger* tagger = nullptr);

}  // namespace deltamine::text
