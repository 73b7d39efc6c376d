#pragma once

// Annotated synthetic discussion fixture for the argument-mining pipeline.
// Claims and premises are planted with distinctive POS templates: claims
// follow "<topic> was <VBD> to <verb>", premises follow "<topic> is <VBG>
// <adj> quality <adj> <noun>". Rule markers appear on a subset; the marker-
// free instances are the similarity targets.

#include <string>
#include <vector>

#include "deltamine/argminer.hpp"
#include "deltamine/corpus.hpp"
#include "deltamine/rng.hpp"
#include "deltamine/textprep.hpp"

namespace fixtures {

struct ArgmineFixture {
  std::vector<deltamine::corpus::Thread> threads;
  deltamine::corpus::AnnotationMap annotations;
  std::vector<deltamine::text::AnalyzedThread> analyzed;
  deltamine::text::EmbeddingTable table;
  deltamine::argmine::DocFreq df;
};

// code-point offsets of `needle` inside `haystack`
inline deltamine::text::Span find_span(const std::string& haystack, const std::string& needle) {
  const auto h = deltamine::text::utf8_decode(haystack);
  const auto n = deltamine::text::utf8_decode(needle);
  const auto pos = h.find(n);
  if (pos == std::u32string::npos) throw std::logic_error("fixture clause not found: " + needle);
  return {pos, pos + n.size()};
}

inline ArgmineFixture make_argmine_fixture(std::uint64_t seed = 404) {
  using deltamine::corpus::AnnotationSpan;
  using deltamine::corpus::Comment;
  using deltamine::corpus::ComponentKind;
  using deltamine::corpus::Thread;

  const std::vector<std::string> topics = {"healthcare", "taxation", "transit", "education",
                                           "farming"};
  ArgmineFixture fx;

  for (std::size_t ti = 0; ti < topics.size(); ++ti) {
    const std::string& topic = topics[ti];
    Thread thread;
    thread.thread_id = "arg" + std::to_string(ti);

    auto add = [&](const std::string& id, const std::string& parent, const std::string& body,
                   long karma) -> Comment& {
      Comment c;
      c.id = thread.thread_id + "_" + id;
      if (!parent.empty()) c.parent_id = thread.thread_id + "_" + parent;
      c.author = "u" + id;
      c.body = body;
      c.karma = karma;
      thread.comments.push_back(std::move(c));
      return thread.comments.back();
    };

    auto annotate = [&](const Comment& c, const std::string& clause, ComponentKind kind) {
      auto& set = fx.annotations[c.id];
      set.comment_id = c.id;
      const auto span = find_span(c.body, clause);
      set.spans.push_back(AnnotationSpan{span.begin, span.end, kind});
    };

    const std::string claim1 = topic + " was destined to fail";
    const std::string claim2 = topic + " was doomed to struggle";
    const std::string claim3 = topic + " was fated to shrink";
    const std::string claim_cand = topic + " was destined to stumble";
    const std::string premise1 = topic + " is delivering poor quality expensive coverage";
    const std::string premise2 = topic + " is producing low quality defective paperwork";
    const std::string premise_cand = topic + " is delivering weak quality expensive service";

    add("op", "", "Let us discuss " + topic + " today. The " + topic + " debate matters.", 5);
    const auto& c1 = add("c1", "op", "I think that " + claim1 + ".", 10);
    annotate(c1, claim1, ComponentKind::Claim);
    const auto& c2 = add("c2", "c1", claim2 + " because " + premise1 + ".", 8);
    annotate(c2, claim2, ComponentKind::Claim);
    annotate(c2, premise1, ComponentKind::Premise);
    const auto& c3 = add("c3", "c2", claim3 + " because " + premise2 + ".", 6);
    annotate(c3, claim3, ComponentKind::Claim);
    annotate(c3, premise2, ComponentKind::Premise);
    const auto& c4 = add("c4", "op", claim_cand + ".", 4);
    annotate(c4, claim_cand, ComponentKind::Claim);
    const auto& c5 = add("c5", "op", premise_cand + ".", 3);
    annotate(c5, premise_cand, ComponentKind::Premise);
    add("c6", "op", "Many people discuss " + topic + " daily. The weather stayed calm there.", 1);

    fx.threads.push_back(std::move(thread));
  }

  fx.analyzed = deltamine::text::analyze_threads(fx.threads, nullptr);
  fx.df = deltamine::argmine::DocFreq::build(fx.analyzed);

  // small random word vectors; the POS one-hot tail dominates the geometry
  fx.table.dim = 12;
  deltamine::Rng rng(seed);
  auto add_word = [&](const std::string& w) {
    if (fx.table.vocab.count(w)) return;
    fx.table.vocab.emplace(w, fx.table.words.size());
    fx.table.words.push_back(w);
    for (std::size_t k = 0; k < fx.table.dim; ++k) {
      fx.table.vectors.push_back(rng.uniform(-0.25, 0.25));
    }
  };
  for (const auto& thread : fx.analyzed) {
    for (const auto& comment : thread.comments) {
      for (const auto& sent : comment.sentences) {
        for (const auto& tok : sent.tokens) add_word(tok.surface);
      }
    }
  }
  return fx;
}

}  // namespace fixtures
