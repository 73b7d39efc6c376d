#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "deltamine/argminer.hpp"

namespace deltamine::argmine {

double dtw_distance(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("dtw_distance: empty sequence");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t dim = a[0].size();
  for (const auto& v : a)
    if (v.size() != dim) throw std::invalid_argument("dtw_distance: ragged sequence");
  for (const auto& v : b)
    if (v.size() != dim) throw std::invalid_argument("dtw_distance: dimension mismatch");

  auto d = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = a[i][k] - b[j][k];
      acc += diff * diff;
    }
    return acc;
  };

  // one rolling row of the cumulative-cost matrix
  std::vector<double> prev(m), cur(m);
  prev[0] = d(0, 0);
  for (std::size_t j = 1; j < m; ++j) prev[j] = prev[j - 1] + d(0, j);
  for (std::size_t i = 1; i < n; ++i) {
    cur[0] = prev[0] + d(i, 0);
    for (std::size_t j = 1; j < m; ++j) {
      cur[j] = d(i, j) + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return std::sqrt(prev[m - 1]);
}

namespace {

bool is_word_token(const text::Token& tok) {
  for (unsigned char c : tok.surface) {
    if (std::isalnum(c) || c >= 0x80) return true;
  }
  return false;
}

// ordered bag of word-token surfaces with counts
std::map<std::string, std::size_t> bag_of_words(std::span<const text::Token> tokens) {
  std::map<std::string, std::size_t> bag;
  for (const auto& tok : tokens) {
    if (is_word_token(tok)) ++bag[tok.surface];
  }
  return bag;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double DocFreq::idf_unigram(const std::string& lemma) const {
  auto it = unigrams.find(lemma);
  const std::size_t df = it == unigrams.end() ? 1 : std::max<std::size_t>(it->second, 1);
  return std::log(static_cast<double>(n_docs) / static_cast<double>(df));
}

double cosine_distance(std::span<const text::Token> a, std::span<const text::Token> b,
                       const text::EmbeddingTable& table, const DocFreq& df) {
  auto mean_vector = [&](std::span<const text::Token> toks) {
    std::map<std::string, std::size_t> tf;  // lemma counts
    std::map<std::string, std::string> surface_of;
    for (const auto& tok : toks) {
      if (!is_word_token(tok)) continue;
      ++tf[tok.lemma];
      surface_of.emplace(tok.lemma, tok.surface);
    }
    std::vector<double> v(table.dim, 0.0);
    double weight_sum = 0.0;
    for (const auto& [lemma, count] : tf) {
      const double w = static_cast<double>(count) * df.idf_unigram(lemma);
      if (w <= 0.0) continue;
      const auto emb = table.embed(surface_of[lemma]);
      for (std::size_t i = 0; i < table.dim; ++i) v[i] += w * emb[i];
      weight_sum += w;
    }
    if (weight_sum > 0.0) {
      for (auto& x : v) x /= weight_sum;
    }
    return v;
  };
  const auto va = mean_vector(a);
  const auto vb = mean_vector(b);
  return 1.0 - text::cosine(va, vb);
}

namespace {

// exact min-cost max-flow on the small transportation graph; capacities are
// integers (counts cross-scaled by the opposite total), costs are Euclidean
// ground distances
struct Transport {
  struct Edge {
    std::size_t to;
    long long cap;
    double cost;
    std::size_t rev;
  };
  std::vector<std::vector<Edge>> g;

  explicit Transport(std::size_t n) : g(n) {}

  void add_edge(std::size_t from, std::size_t to, long long cap, double cost) {
    g[from].push_back({to, cap, cost, g[to].size()});
    g[to].push_back({from, 0, -cost, g[from].size() - 1});
  }

  double min_cost_flow(std::size_t source, std::size_t sink) {
    double total_cost = 0.0;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    while (true) {
      // Bellman-Ford shortest path by cost
      std::vector<double> dist(g.size(), kInf);
      std::vector<std::pair<std::size_t, std::size_t>> parent(g.size(), {SIZE_MAX, SIZE_MAX});
      dist[source] = 0.0;
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t u = 0; u < g.size(); ++u) {
          if (dist[u] == kInf) continue;
          for (std::size_t e = 0; e < g[u].size(); ++e) {
            const Edge& edge = g[u][e];
            if (edge.cap <= 0) continue;
            if (dist[u] + edge.cost < dist[edge.to] - 1e-15) {
              dist[edge.to] = dist[u] + edge.cost;
              parent[edge.to] = {u, e};
              improved = true;
            }
          }
        }
      }
      if (dist[sink] == kInf) break;
      long long push = std::numeric_limits<long long>::max();
      for (std::size_t v = sink; v != source;) {
        auto [u, e] = parent[v];
        push = std::min(push, g[u][e].cap);
        v = u;
      }
      for (std::size_t v = sink; v != source;) {
        auto [u, e] = parent[v];
        g[u][e].cap -= push;
        g[g[u][e].to][g[u][e].rev].cap += push;
        v = u;
      }
      total_cost += static_cast<double>(push) * dist[sink];
    }
    return total_cost;
  }
};

}  // namespace

double wmd_distance(std::span<const text::Token> a, std::span<const text::Token> b,
                    const text::EmbeddingTable& table) {
  const auto bag_a = bag_of_words(a);
  const auto bag_b = bag_of_words(b);
  if (bag_a.empty() || bag_b.empty()) throw std::invalid_argument("wmd_distance: empty segment");

  std::vector<std::pair<std::string, long long>> wa(bag_a.begin(), bag_a.end());
  std::vector<std::pair<std::string, long long>> wb(bag_b.begin(), bag_b.end());
  long long total_a = 0, total_b = 0;
  for (const auto& [w, c] : wa) total_a += c;
  for (const auto& [w, c] : wb) total_b += c;

  std::vector<std::vector<double>> va, vb;
  for (const auto& [w, c] : wa) va.push_back(table.embed(w));
  for (const auto& [w, c] : wb) vb.push_back(table.embed(w));

  // scale both marginals to integers: supply_i = c_i * total_b sums to
  // total_a * total_b, as does demand_j = c_j * total_a
  const std::size_t source = 0;
  const std::size_t sink = wa.size() + wb.size() + 1;
  Transport net(sink + 1);
  for (std::size_t i = 0; i < wa.size(); ++i) {
    net.add_edge(source, 1 + i, wa[i].second * total_b, 0.0);
  }
  for (std::size_t j = 0; j < wb.size(); ++j) {
    net.add_edge(1 + wa.size() + j, sink, wb[j].second * total_a, 0.0);
  }
  for (std::size_t i = 0; i < wa.size(); ++i) {
    for (std::size_t j = 0; j < wb.size(); ++j) {
      net.add_edge(1 + i, 1 + wa.size() + j, std::numeric_limits<long long>::max() / 4,
                   euclidean(va[i], vb[j]));
    }
  }
  const double cost = net.min_cost_flow(source, sink);
  return cost / (static_cast<double>(total_a) * static_cast<double>(total_b));
}

double kl_divergence(std::span<const text::Token> a, std::span<const text::Token> b,
                     double alpha) {
  const auto bag_a = bag_of_words(a);
  const auto bag_b = bag_of_words(b);
  if (bag_a.empty() || bag_b.empty()) throw std::invalid_argument("kl_divergence: empty segment");

  std::map<std::string, std::pair<std::size_t, std::size_t>> joint;
  for (const auto& [w, c] : bag_a) joint[w].first = c;
  for (const auto& [w, c] : bag_b) joint[w].second = c;

  double total_a = 0.0, total_b = 0.0;
  for (const auto& [w, counts] : joint) {
    total_a += static_cast<double>(counts.first);
    total_b += static_cast<double>(counts.second);
  }
  const double denom_a = total_a + alpha * static_cast<double>(joint.size());
  const double denom_b = total_b + alpha * static_cast<double>(joint.size());

  double kl = 0.0;
  for (const auto& [w, counts] : joint) {
    const double p = (static_cast<double>(counts.first) + alpha) / denom_a;
    const double q = (static_cast<double>(counts.second) + alpha) / denom_b;
    kl += p * std::log(p / q);
  }
  return kl;
}

SeedStats seed_stats(std::size_t n_claim_seeds, std::size_t n_premise_seeds,
                     const PairDistanceFn& claim_dist, const PairDistanceFn& premise_dist) {
  SeedStats stats;
  auto fill = [](std::size_t n, const PairDistanceFn& dist, double& mean, double& stddev,
                 std::size_t& pairs, bool& ok) {
    if (n < 2) {
      ok = false;
      return;
    }
    std::vector<double> d;
    d.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d.push_back(dist(i, j));
    }
    pairs = d.size();
    double sum = 0.0;
    for (double x : d) sum += x;
    mean = sum / static_cast<double>(d.size());
    double var = 0.0;
    for (double x : d) var += (mean - x) * (mean - x);
    stddev = std::sqrt(var / static_cast<double>(d.size()));
    ok = true;
  };
  fill(n_claim_seeds, claim_dist, stats.d_c, stats.s_c, stats.n_c, stats.claim_ok);
  fill(n_premise_seeds, premise_dist, stats.d_e, stats.s_e, stats.n_e, stats.premise_ok);
  return stats;
}

std::optional<std::pair<ComponentKind, double>> classify_segment(double min_claim,
                                                                 double min_premise,
                                                                 const SeedStats& stats) {
  const bool claim_eligible = stats.claim_ok && min_claim <= stats.d_c;
  const bool premise_eligible = stats.premise_ok && min_premise <= stats.d_e;
  if (!claim_eligible && !premise_eligible) return std::nullopt;
  if (claim_eligible && !premise_eligible) return std::make_pair(ComponentKind::Claim, min_claim);
  if (!claim_eligible && premise_eligible) {
    return std::make_pair(ComponentKind::Premise, min_premise);
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double margin_c = stats.s_c == 0.0 ? kInf : (stats.d_c - min_claim) / stats.s_c;
  const double margin_e = stats.s_e == 0.0 ? kInf : (stats.d_e - min_premise) / stats.s_e;
  if (margin_c < margin_e) return std::make_pair(ComponentKind::Premise, min_premise);
  return std::make_pair(ComponentKind::Claim, min_claim);
}

}  // namespace deltamine::argmine
