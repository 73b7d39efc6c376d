#pragma once

// Synthetic corpora and scratch-dir helpers shared by the unit and
// acceptance suites.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "deltamine/argminer.hpp"
#include "deltamine/corpus.hpp"
#include "deltamine/persuasion.hpp"
#include "deltamine/rng.hpp"
#include "deltamine/textprep.hpp"

namespace fixtures {

namespace corpus = deltamine::corpus;
namespace text = deltamine::text;
namespace persuasion = deltamine::persuasion;
using deltamine::Rng;

class TempDir {
 public:
  TempDir() {
    Rng rng(static_cast<std::uint64_t>(
        std::chrono::steady_clock::now().time_since_epoch().count()));
    path_ = std::filesystem::temp_directory_path() /
            ("deltamine-test-" + std::to_string(rng.next_u64()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::trunc);
  os << content;
}

// ---------------------------------------------------------------------------
// Marker corpus: positives contain a fixed persuasion-marker sentence, karma
// is a deterministic function of the text so the regression head has a
// learnable target.

struct MarkerCorpusConfig {
  std::size_t chains = 20;
  std::uint64_t seed = 7;
  double positive_fraction = 0.5;
  std::size_t min_len = 3;
  std::size_t max_len = 6;
  std::size_t max_sentences = 2;
  std::size_t max_words = 5;
  bool marker_in_last_comment = false;  // otherwise a random reply
};

inline const std::vector<std::string>& noise_words() {
  static const std::vector<std::string> words = {
      "people", "city",   "taxes",  "music",  "water",  "roads",  "school", "market",
      "garden", "winter", "travel", "coffee", "story",  "stone",  "light",  "river",
      "grow",   "move",   "work",   "help",   "rise",   "stay",   "turn",   "keep"};
  return words;
}

inline std::string marker_sentence() { return "that truly changed my view here."; }

inline std::vector<corpus::Chain> make_marker_chains(const MarkerCorpusConfig& cfg) {
  Rng rng(cfg.seed);
  const auto& pool = noise_words();
  std::vector<corpus::Chain> chains;
  for (std::size_t n = 0; n < cfg.chains; ++n) {
    const bool positive =
        static_cast<double>(n) < cfg.positive_fraction * static_cast<double>(cfg.chains);
    const std::size_t len =
        cfg.min_len + static_cast<std::size_t>(rng.next_below(cfg.max_len - cfg.min_len + 1));
    const std::size_t marker_at =
        positive ? (cfg.marker_in_last_comment
                        ? len - 1
                        : 1 + static_cast<std::size_t>(rng.next_below(len - 1)))
                 : len;  // never

    corpus::Chain chain;
    chain.thread_id = "t" + std::to_string(n);
    for (std::size_t i = 0; i < len; ++i) {
      corpus::Comment c;
      c.id = chain.thread_id + "c" + std::to_string(i);
      if (i > 0) c.parent_id = chain.thread_id + "c" + std::to_string(i - 1);
      c.author = "user" + std::to_string(rng.next_below(6));
      const std::size_t n_sent = 1 + rng.next_below(cfg.max_sentences);
      bool has_marker = false;
      for (std::size_t s = 0; s < n_sent; ++s) {
        const std::size_t n_words = 3 + rng.next_below(cfg.max_words - 2);
        std::string sent;
        for (std::size_t w = 0; w < n_words; ++w) {
          if (w) sent += ' ';
          sent += pool[rng.next_below(pool.size())];
        }
        sent += '.';
        if (!c.body.empty()) c.body += ' ';
        c.body += sent;
      }
      if (i == marker_at) {
        c.body += ' ';
        c.body += marker_sentence();
        c.delta_awarded = true;
        has_marker = true;
      }
      c.karma = 3 + (has_marker ? 7 : 0);
      chain.comments.push_back(std::move(c));
    }
    chain.label = positive;
    chains.push_back(std::move(chain));
  }
  return chains;
}

// a chain laid out as a linear thread, for file-based tests
inline std::vector<corpus::Thread> chains_to_threads(const std::vector<corpus::Chain>& chains) {
  std::vector<corpus::Thread> threads;
  for (const auto& chain : chains) {
    corpus::Thread t;
    t.thread_id = chain.thread_id;
    t.comments = chain.comments;
    threads.push_back(std::move(t));
  }
  return threads;
}

// random embedding table over the corpus vocabulary (first-occurrence order)
inline text::EmbeddingTable make_random_table(const std::vector<corpus::Chain>& chains,
                                              std::size_t dim, std::uint64_t seed) {
  text::EmbeddingTable table;
  table.dim = dim;
  Rng rng(seed);
  auto add_word = [&](const std::string& w) {
    if (table.vocab.count(w)) return;
    table.vocab.emplace(w, table.words.size());
    table.words.push_back(w);
    for (std::size_t k = 0; k < dim; ++k) table.vectors.push_back(rng.uniform(-0.25, 0.25));
  };
  for (const auto& chain : chains) {
    for (const auto& comment : chain.comments) {
      for (const auto& tok : text::tokenize(comment.body)) add_word(tok.surface);
    }
  }
  return table;
}

inline std::vector<persuasion::EncodedChain> encode_all(const std::vector<corpus::Chain>& chains,
                                                        const text::EmbeddingTable& table) {
  std::vector<persuasion::EncodedChain> out;
  out.reserve(chains.size());
  for (const auto& c : chains) out.push_back(persuasion::encode_chain(c, table));
  return out;
}

}  // namespace fixtures
