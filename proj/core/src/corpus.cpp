#include "deltamine/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "deltamine/textprep.hpp"

namespace deltamine::corpus {

using json = nlohmann::json;

const Comment& Thread::root() const {
  for (const auto& c : comments) {
    if (!c.parent_id) return c;
  }
  throw std::logic_error("thread " + thread_id + " has no root comment");
}

const Comment* Thread::find(const std::string& id) const {
  for (const auto& c : comments) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string Chain::id() const {
  return thread_id + "/" + (comments.empty() ? std::string() : comments.back().id);
}

namespace {

bool body_blank(const std::string& body) {
  return std::all_of(body.begin(), body.end(), [](unsigned char c) { return std::isspace(c); });
}

Thread thread_from_json(const json& j) {
  Thread t;
  t.thread_id = j.at("thread_id").get<std::string>();
  for (const auto& cj : j.at("comments")) {
    Comment c;
    c.id = cj.at("id").get<std::string>();
    if (cj.contains("parent_id") && !cj["parent_id"].is_null()) {
      c.parent_id = cj["parent_id"].get<std::string>();
    }
    c.author = cj.at("author").get<std::string>();
    c.body = cj.at("body").get<std::string>();
    c.karma = cj.at("karma").get<long>();
    c.delta_awarded = cj.at("delta_awarded").get<bool>();
    t.comments.push_back(std::move(c));
  }
  return t;
}

json thread_to_json(const Thread& t) {
  json comments = json::array();
  for (const auto& c : t.comments) {
    json cj;
    cj["id"] = c.id;
    if (c.parent_id) cj["parent_id"] = *c.parent_id;
    cj["author"] = c.author;
    cj["body"] = c.body;
    cj["karma"] = c.karma;
    cj["delta_awarded"] = c.delta_awarded;
    comments.push_back(std::move(cj));
  }
  return json{{"thread_id", t.thread_id}, {"comments", std::move(comments)}};
}

}  // namespace

std::string validate_thread(const Thread& t) {
  if (t.comments.empty()) return "thread " + t.thread_id + ": no comments";
  std::unordered_map<std::string, std::size_t> index;
  std::size_t roots = 0;
  for (std::size_t i = 0; i < t.comments.size(); ++i) {
    const auto& c = t.comments[i];
    if (c.id.empty()) return "thread " + t.thread_id + ": comment with empty id";
    if (!index.emplace(c.id, i).second) {
      return "thread " + t.thread_id + ": duplicate comment id '" + c.id + "'";
    }
    if (!c.parent_id) ++roots;
    if (body_blank(c.body)) {
      return "thread " + t.thread_id + ": comment '" + c.id + "' has an empty body";
    }
  }
  if (roots == 0) return "thread " + t.thread_id + ": no root comment";
  if (roots > 1) return "thread " + t.thread_id + ": multiple root comments";
  for (const auto& c : t.comments) {
    if (c.parent_id && !index.count(*c.parent_id)) {
      return "thread " + t.thread_id + ": comment '" + c.id + "' references nonexistent parent '" +
             *c.parent_id + "'";
    }
  }
  // reachability from the root implies the parent relation is acyclic
  std::unordered_map<std::string, std::vector<std::size_t>> children;
  std::size_t root_idx = 0;
  for (std::size_t i = 0; i < t.comments.size(); ++i) {
    if (t.comments[i].parent_id) {
      children[*t.comments[i].parent_id].push_back(i);
    } else {
      root_idx = i;
    }
  }
  std::vector<std::size_t> queue{root_idx};
  std::unordered_set<std::size_t> seen{root_idx};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    for (std::size_t ch : children[t.comments[queue[q]].id]) {
      if (seen.insert(ch).second) queue.push_back(ch);
    }
  }
  if (seen.size() != t.comments.size()) {
    for (std::size_t i = 0; i < t.comments.size(); ++i) {
      if (!seen.count(i)) {
        return "thread " + t.thread_id + ": comment '" + t.comments[i].id +
               "' is not reachable from the root";
      }
    }
  }
  return {};
}

LoadReport load_threads(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("corpus: cannot open " + path.string());
  LoadReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    Thread t;
    try {
      t = thread_from_json(json::parse(line));
    } catch (const json::exception& e) {
      report.diagnostics.push_back({line_no, std::string("parse error: ") + e.what()});
      continue;
    }
    if (auto err = validate_thread(t); !err.empty()) {
      report.diagnostics.push_back({line_no, err});
      continue;
    }
    report.threads.push_back(std::move(t));
  }
  return report;
}

void save_threads(std::span<const Thread> threads, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("corpus: cannot open " + path.string() + " for writing");
  for (const auto& t : threads) os << thread_to_json(t).dump() << '\n';
  if (!os) throw std::runtime_error("corpus: write failed for " + path.string());
}

std::vector<Chain> extract_chains(const Thread& thread, std::size_t min_len,
                                  std::size_t max_len) {
  std::unordered_map<std::string, std::vector<std::size_t>> children;
  std::size_t root_idx = 0;
  for (std::size_t i = 0; i < thread.comments.size(); ++i) {
    if (thread.comments[i].parent_id) {
      children[*thread.comments[i].parent_id].push_back(i);
    } else {
      root_idx = i;
    }
  }

  // breadth-first over (node, path); leaves are emitted in level order
  struct Item {
    std::size_t node;
    std::vector<std::size_t> path;
  };
  std::vector<Chain> chains;
  std::vector<Item> queue{{root_idx, {root_idx}}};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const Item item = queue[q];  // push_back below may reallocate the queue
    const auto& [node, path] = item;
    const auto& kids = children[thread.comments[node].id];
    if (kids.empty()) {
      if (path.size() >= min_len && path.size() <= max_len) {
        Chain chain;
        chain.thread_id = thread.thread_id;
        for (std::size_t idx : path) {
          chain.comments.push_back(thread.comments[idx]);
          chain.label = chain.label || thread.comments[idx].delta_awarded;
        }
        chains.push_back(std::move(chain));
      }
      continue;
    }
    for (std::size_t kid : kids) {
      auto next = path;
      next.push_back(kid);
      queue.push_back({kid, std::move(next)});
    }
  }
  return chains;
}

std::string to_string(ComponentKind kind) {
  return kind == ComponentKind::Claim ? "claim" : "premise";
}

ComponentKind component_kind_from(const std::string& s) {
  if (s == "claim") return ComponentKind::Claim;
  if (s == "premise") return ComponentKind::Premise;
  throw std::invalid_argument("unknown component kind '" + s + "'");
}

namespace {

std::string validate_spans(const AnnotationSet& set,
                           std::optional<std::size_t> body_len) {
  for (const auto& s : set.spans) {
    if (s.start >= s.end) {
      return "annotation for '" + set.comment_id + "': span start " + std::to_string(s.start) +
             " not before end " + std::to_string(s.end);
    }
    if (body_len && s.end > *body_len) {
      return "annotation for '" + set.comment_id + "': span end " + std::to_string(s.end) +
             " exceeds body length " + std::to_string(*body_len);
    }
  }
  for (std::size_t i = 0; i < set.spans.size(); ++i) {
    for (std::size_t j = i + 1; j < set.spans.size(); ++j) {
      const auto& a = set.spans[i];
      const auto& b = set.spans[j];
      if (a.kind == b.kind && a.start < b.end && b.start < a.end) {
        return "annotation for '" + set.comment_id + "': overlapping " + to_string(a.kind) +
               " spans";
      }
    }
  }
  return {};
}

AnnotationMap load_annotations_impl(
    const std::filesystem::path& path,
    const std::unordered_map<std::string, std::size_t>* body_lens) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("annotations: cannot open " + path.string());
  AnnotationMap out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("annotations line " + std::to_string(line_no) + ": " + e.what());
    }
    AnnotationSet set;
    set.comment_id = j.at("comment_id").get<std::string>();
    for (const auto& sj : j.at("spans")) {
      AnnotationSpan span;
      span.start = sj.at("start").get<std::size_t>();
      span.end = sj.at("end").get<std::size_t>();
      span.kind = component_kind_from(sj.at("kind").get<std::string>());
      set.spans.push_back(span);
    }
    std::optional<std::size_t> body_len;
    if (body_lens) {
      auto it = body_lens->find(set.comment_id);
      if (it != body_lens->end()) body_len = it->second;
    }
    if (auto err = validate_spans(set, body_len); !err.empty()) {
      throw std::runtime_error("annotations line " + std::to_string(line_no) + ": " + err);
    }
    out[set.comment_id] = std::move(set);
  }
  return out;
}

}  // namespace

AnnotationMap load_annotations(const std::filesystem::path& path) {
  return load_annotations_impl(path, nullptr);
}

AnnotationMap load_annotations(const std::filesystem::path& path,
                               std::span<const Thread> threads) {
  std::unordered_map<std::string, std::size_t> body_lens;
  for (const auto& t : threads) {
    for (const auto& c : t.comments) {
      body_lens[c.id] = text::utf8_decode(c.body).size();
    }
  }
  return load_annotations_impl(path, &body_lens);
}

void save_annotations(const AnnotationMap& annotations, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("annotations: cannot open " + path.string() + " for writing");
  for (const auto& [id, set] : annotations) {
    json spans = json::array();
    for (const auto& s : set.spans) {
      spans.push_back(json{{"start", s.start}, {"end", s.end}, {"kind", to_string(s.kind)}});
    }
    os << json{{"comment_id", id}, {"spans", std::move(spans)}}.dump() << '\n';
  }
  if (!os) throw std::runtime_error("annotations: write failed for " + path.string());
}

}  // namespace deltamine::corpus
