#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "deltamine/textprep.hpp"

namespace deltamine::text {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c += 32;
  return out;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == ',')) return false;
  return std::isdigit(static_cast<unsigned char>(s.front())) != 0;
}

std::vector<std::string> features(const std::string& word, const std::string& prev_tag) {
  const std::string lw = ascii_lower(word);
  std::vector<std::string> f;
  f.reserve(9);
  f.push_back("b");
  f.push_back("w=" + lw);
  const std::size_t n = lw.size();
  if (n >= 1) f.push_back("s1=" + lw.substr(n - 1));
  if (n >= 2) f.push_back("s2=" + lw.substr(n - 2));
  if (n >= 3) f.push_back("s3=" + lw.substr(n - 3));
  f.push_back("p1=" + lw.substr(0, 1));
  f.push_back("t-1=" + prev_tag);
  if (all_digits(word)) {
    f.push_back("sh=d");
  } else if (!word.empty() && std::isupper(static_cast<unsigned char>(word[0]))) {
    f.push_back("sh=u");
  } else if (word.find('-') != std::string::npos) {
    f.push_back("sh=h");
  }
  return f;
}

}  // namespace

void PosTagger::train(
    const std::vector<std::vector<std::pair<std::string, std::string>>>& sentences,
    int iterations, std::uint64_t seed) {
  tags_.clear();
  weights_.clear();
  for (const auto& sent : sentences) {
    for (const auto& [word, tag] : sent) {
      (void)word;
      if (std::find(tags_.begin(), tags_.end(), tag) == tags_.end()) tags_.push_back(tag);
    }
  }
  if (tags_.empty()) return;
  const std::size_t n_tags = tags_.size();

  std::unordered_map<std::string, std::vector<double>> totals;
  std::unordered_map<std::string, std::vector<std::size_t>> stamps;
  std::size_t now = 0;

  auto tag_index = [&](const std::string& t) {
    return static_cast<std::size_t>(std::find(tags_.begin(), tags_.end(), t) - tags_.begin());
  };
  auto bump = [&](const std::string& feat, std::size_t idx, double delta) {
    auto& w = weights_[feat];
    if (w.empty()) w.assign(n_tags, 0.0);
    auto& tot = totals[feat];
    if (tot.empty()) tot.assign(n_tags, 0.0);
    auto& st = stamps[feat];
    if (st.empty()) st.assign(n_tags, 0);
    tot[idx] += static_cast<double>(now - st[idx]) * w[idx];
    st[idx] = now;
    w[idx] += delta;
  };

  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);

  for (int iter = 0; iter < iterations; ++iter) {
    rng.shuffle(order);
    for (std::size_t si : order) {
      std::string prev = "<s>";
      for (const auto& [word, gold] : sentences[si]) {
        ++now;
        const std::string pred = predict(word, prev);
        if (pred != gold) {
          const std::size_t gi = tag_index(gold);
          const std::size_t pi = tag_index(pred);
          for (const auto& feat : features(word, prev)) {
            bump(feat, gi, 1.0);
            bump(feat, pi, -1.0);
          }
        }
        prev = pred;
      }
    }
  }

  // averaged weights
  for (auto& [feat, w] : weights_) {
    auto& tot = totals[feat];
    auto& st = stamps[feat];
    for (std::size_t i = 0; i < w.size(); ++i) {
      tot[i] += static_cast<double>(now - st[i]) * w[i];
      w[i] = tot[i] / static_cast<double>(now);
    }
  }
}

std::string PosTagger::predict(const std::string& word, const std::string& prev_tag) const {
  std::vector<double> scores(tags_.size(), 0.0);
  for (const auto& feat : features(word, prev_tag)) {
    auto it = weights_.find(feat);
    if (it == weights_.end()) continue;
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] += it->second[i];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  // an all-zero score vector means the model knows nothing about this word
  if (scores[best] == 0.0) {
    const std::string fb = fallback_tag(word);
    if (std::find(tags_.begin(), tags_.end(), fb) != tags_.end()) return fb;
  }
  return tags_[best];
}

void PosTagger::tag(std::vector<Token>& sentence) const {
  std::string prev = "<s>";
  for (auto& tok : sentence) {
    if (tok.pos.empty()) {
      tok.pos = trained() ? predict(tok.surface, prev) : fallback_tag(tok.surface);
    }
    prev = tok.pos;
  }
}

std::vector<std::string> PosTagger::tag_words(const std::vector<std::string>& words) const {
  std::vector<std::string> out;
  out.reserve(words.size());
  std::string prev = "<s>";
  for (const auto& w : words) {
    std::string t = trained() ? predict(w, prev) : fallback_tag(w);
    prev = t;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::vector<std::pair<std::string, std::string>>> PosTagger::load_sample(
    const std::filesystem::path& sample) {
  std::ifstream is(sample);
  if (!is) throw std::runtime_error("tagger: cannot open sample " + sample.string());
  std::vector<std::vector<std::pair<std::string, std::string>>> sentences;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::pair<std::string, std::string>> sent;
    std::string item;
    while (ls >> item) {
      const auto pos = item.rfind('_');
      if (pos == std::string::npos || pos == 0 || pos + 1 == item.size()) {
        throw std::runtime_error("tagger: malformed token_tag pair '" + item + "'");
      }
      sent.emplace_back(item.substr(0, pos), item.substr(pos + 1));
    }
    if (!sent.empty()) sentences.push_back(std::move(sent));
  }
  return sentences;
}

PosTagger PosTagger::train_from_file(const std::filesystem::path& sample) {
  PosTagger tagger;
  tagger.train(load_sample(sample));
  return tagger;
}

std::string fallback_tag(std::string_view word) {
  if (word.empty()) return "NN";
  const char c0 = word[0];
  if (word.size() == 1 && !std::isalnum(static_cast<unsigned char>(c0))) {
    switch (c0) {
      case '.':
      case '!':
      case '?':
        return ".";
      case ',':
        return ",";
      case ':':
      case ';':
        return ":";
      default:
        return "SYM";
    }
  }
  if (all_digits(word)) return "CD";
  const std::string lw = ascii_lower(word);
  auto ends = [&](std::string_view suf) {
    return lw.size() > suf.size() && lw.compare(lw.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (lw == "n't" || lw == "not") return "RB";
  if (ends("ly")) return "RB";
  if (ends("ing")) return "VBG";
  if (ends("ed")) return "VBD";
  if (ends("able") || ends("ible") || ends("ous") || ends("ful") || ends("ive") || ends("ic") ||
      ends("al"))
    return "JJ";
  if (std::isupper(static_cast<unsigned char>(c0))) return "NNP";
  if (ends("s") && !ends("ss")) return "NNS";
  return "NN";
}

void pos_tag(std::vector<Token>& sentence, const PosTagger* tagger) {
  if (tagger && tagger->trained()) {
    tagger->tag(sentence);
    return;
  }
  for (auto& tok : sentence) {
    if (tok.pos.empty()) tok.pos = fallback_tag(tok.surface);
  }
}

}  // namespace deltamine::text
