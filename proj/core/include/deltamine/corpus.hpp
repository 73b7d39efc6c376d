#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deltamine::corpus {

struct Comment {
  std::string id;
  std::optional<std::string> parent_id;  // absent for the OP comment
  std::string author;
  std::string body;
  long karma = 0;
  bool delta_awarded = false;

  bool operator==(const Comment&) const = default;
};

// A discussion tree rooted at the OP comment. Comments keep input order;
// children of a node are visited in that order everywhere.
struct Thread {
  std::string thread_id;
  std::vector<Comment> comments;

  const Comment& root() const;
  const Comment* find(const std::string& id) const;

  bool operator==(const Thread&) const = default;
};

// Root-to-leaf comment path; comments[0] is the OP.
struct Chain {
  std::string thread_id;
  std::vector<Comment> comments;
  bool label = false;  // some comment in the chain was delta-awarded

  std::size_t length() const { return comments.size(); }
  std::string id() const;  // "<thread_id>/<leaf id>"
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based input line
  std::string message;
};

struct LoadReport {
  std::vector<Thread> threads;
  std::vector<Diagnostic> diagnostics;
};

// Newline-delimited JSON, one thread per line:
//   {"thread_id":..., "comments":[{"id","parent_id"?,"author","body","karma","delta_awarded"}]}
// Malformed records are skipped and reported; I/O failure throws.
LoadReport load_threads(const std::filesystem::path& path);
void save_threads(std::span<const Thread> threads, const std::filesystem::path& path);

// Checks ids, the single-root/acyclic/reachable tree shape, and bodies;
// returns an error message or empty when well-formed.
std::string validate_thread(const Thread& thread);

// One chain per root-to-leaf path with min_len <= length <= max_len,
// enumerated by breadth-first traversal (children in input order).
std::vector<Chain> extract_chains(const Thread& thread, std::size_t min_len = 3,
                                  std::size_t max_len = 11);

enum class ComponentKind { Claim, Premise };

std::string to_string(ComponentKind kind);
ComponentKind component_kind_from(const std::string& s);

struct AnnotationSpan {
  std::size_t start = 0;  // code-point offsets into the comment body
  std::size_t end = 0;
  ComponentKind kind = ComponentKind::Claim;

  bool operator==(const AnnotationSpan&) const = default;
};

struct AnnotationSet {
  std::string comment_id;
  std::vector<AnnotationSpan> spans;

  bool operator==(const AnnotationSet&) const = default;
};

using AnnotationMap = std::map<std::string, AnnotationSet>;

// Newline-delimited JSON {"comment_id":..., "spans":[{"start","end","kind"}]}.
// Structural invariants (start < end, same-kind spans non-overlapping) are
// enforced on load; the overload taking threads also checks span bounds
// against the comment bodies.
AnnotationMap load_annotations(const std::filesystem::path& path);
AnnotationMap load_annotations(const std::filesystem::path& path,
                               std::span<const Thread> threads);
void save_annotations(const AnnotationMap& annotations, const std::filesystem::path& path);

}  // namespace deltamine::corpus
