#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "deltamine/textprep.hpp"

namespace deltamine::text {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::span<const double> EmbeddingTable::vector_at(std::size_t index) const {
  return std::span<const double>(vectors.data() + index * dim, dim);
}

std::optional<std::size_t> EmbeddingTable::lookup(std::string_view word) const {
  auto it = vocab.find(std::string(word));
  if (it == vocab.end()) return std::nullopt;
  return it->second;
}

std::vector<double> EmbeddingTable::embed(std::string_view word) const {
  if (auto idx = lookup(word)) {
    auto v = vector_at(*idx);
    return std::vector<double>(v.begin(), v.end());
  }
  if (oov_policy == OovPolicy::HashedBucket && !words.empty()) {
    auto v = vector_at(fnv1a(word) % words.size());
    return std::vector<double>(v.begin(), v.end());
  }
  return std::vector<double>(dim, 0.0);
}

EmbeddingTable train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const SkipgramConfig& config,
                              std::vector<double>* epoch_losses) {
  EmbeddingTable table;
  table.dim = config.dim;
  std::vector<std::size_t> counts;
  for (const auto& sent : sentences) {
    for (const auto& w : sent) {
      auto [it, inserted] = table.vocab.try_emplace(w, table.words.size());
      if (inserted) {
        table.words.push_back(w);
        counts.push_back(0);
      }
      ++counts[it->second];
    }
  }
  const std::size_t vocab_size = table.words.size();
  if (vocab_size == 0) throw std::invalid_argument("train_skipgram: empty vocabulary");

  Rng rng(config.seed);
  table.vectors.resize(vocab_size * config.dim);
  const double init_bound = 0.5 / static_cast<double>(config.dim);
  for (auto& v : table.vectors) v = rng.uniform(-init_bound, init_bound);
  if (config.epochs == 0) {
    if (epoch_losses) epoch_losses->clear();
    return table;
  }

  // unigram^0.75 negative-sampling table
  std::vector<std::size_t> neg_table;
  {
    const std::size_t table_size = std::max<std::size_t>(vocab_size * 32, 4096);
    neg_table.reserve(table_size);
    double total = 0.0;
    for (auto c : counts) total += std::pow(static_cast<double>(c), 0.75);
    std::size_t word = 0;
    double cum = std::pow(static_cast<double>(counts[0]), 0.75) / total;
    for (std::size_t i = 0; i < table_size; ++i) {
      neg_table.push_back(word);
      if (static_cast<double>(i + 1) / static_cast<double>(table_size) > cum &&
          word + 1 < vocab_size) {
        ++word;
        cum += std::pow(static_cast<double>(counts[word]), 0.75) / total;
      }
    }
  }

  std::vector<double> ctx(vocab_size * config.dim, 0.0);  // output-side vectors
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  std::vector<double> grad_in(config.dim);

  if (epoch_losses) epoch_losses->clear();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const auto& sent : sentences) {
      std::vector<std::size_t> ids;
      ids.reserve(sent.size());
      for (const auto& w : sent) ids.push_back(table.vocab.at(w));
      for (std::size_t pos = 0; pos < ids.size(); ++pos) {
        const std::size_t center = ids[pos];
        const std::size_t lo = pos >= config.window ? pos - config.window : 0;
        const std::size_t hi = std::min(ids.size(), pos + config.window + 1);
        for (std::size_t cpos = lo; cpos < hi; ++cpos) {
          if (cpos == pos) continue;
          const std::size_t outside = ids[cpos];
          double* v_in = table.vectors.data() + center * config.dim;
          std::fill(grad_in.begin(), grad_in.end(), 0.0);
          double pair_loss = 0.0;
          for (std::size_t k = 0; k <= config.negatives; ++k) {
            std::size_t target;
            double label;
            if (k == 0) {
              target = outside;
              label = 1.0;
            } else {
              target = neg_table[rng.next_below(neg_table.size())];
              for (int tries = 0; target == outside && tries < 10; ++tries) {
                target = neg_table[rng.next_below(neg_table.size())];
              }
              if (target == outside) continue;
              label = 0.0;
            }
            double* v_out = ctx.data() + target * config.dim;
            double dot = 0.0;
            for (std::size_t d = 0; d < config.dim; ++d) dot += v_in[d] * v_out[d];
            const double p = sigmoid(dot);
            pair_loss += label > 0.5 ? -std::log(std::max(p, 1e-12))
                                     : -std::log(std::max(1.0 - p, 1e-12));
            const double g = (p - label) * config.lr;
            for (std::size_t d = 0; d < config.dim; ++d) {
              grad_in[d] += g * v_out[d];
              v_out[d] -= g * v_in[d];
            }
          }
          for (std::size_t d = 0; d < config.dim; ++d) v_in[d] -= grad_in[d];
          loss_sum += pair_loss;
          ++loss_count;
        }
      }
    }
    if (epoch_losses) {
      epoch_losses->push_back(loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0);
    }
  }
  for (double v : table.vectors) {
    if (!std::isfinite(v)) throw std::runtime_error("train_skipgram: non-finite vector");
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("embeddings: cannot open " + path.string());
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("embeddings: empty file");
  std::istringstream hs(header);
  std::size_t vocab_size = 0, dim = 0;
  if (!(hs >> vocab_size >> dim) || dim == 0) {
    throw std::runtime_error("embeddings: malformed header line");
  }
  EmbeddingTable table;
  table.dim = dim;
  table.vectors.reserve(vocab_size * dim);
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) throw std::runtime_error("embeddings: malformed row " + std::to_string(row));
    std::size_t got = 0;
    std::string num;
    while (ls >> num) {
      char* end = nullptr;
      const double v = std::strtod(num.c_str(), &end);
      if (end == num.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw std::runtime_error("embeddings: bad number in row " + std::to_string(row));
      }
      table.vectors.push_back(v);
      ++got;
    }
    if (got != dim) {
      throw std::runtime_error("embeddings: row " + std::to_string(row) + " has " +
                               std::to_string(got) + " values, expected " + std::to_string(dim));
    }
    table.vocab.emplace(word, table.words.size());
    table.words.push_back(word);
    ++row;
  }
  if (row != vocab_size) {
    throw std::runtime_error("embeddings: header declares " + std::to_string(vocab_size) +
                             " rows, found " + std::to_string(row));
  }
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("embeddings: cannot open " + path.string() + " for writing");
  os << table.words.size() << ' ' << table.dim << '\n';
  for (std::size_t i = 0; i < table.words.size(); ++i) {
    if (table.words[i].find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("embeddings: word with whitespace cannot be saved: '" +
                                  table.words[i] + "'");
    }
    os << table.words[i];
    auto v = table.vector_at(i);
    for (double x : v) os << ' ' << format_double(x);
    os << '\n';
  }
  if (!os) throw std::runtime_error("embeddings: write failed for " + path.string());
}

std::vector<double> augment(const Token& token, const EmbeddingTable& table) {
  std::vector<double> out = table.embed(token.surface);
  out.resize(table.dim + table.tagset.size(), 0.0);
  auto it = std::find(table.tagset.begin(), table.tagset.end(), token.pos);
  if (it != table.tagset.end()) {
    out[table.dim + static_cast<std::size_t>(it - table.tagset.begin())] = 1.0;
  }
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace deltamine::text
