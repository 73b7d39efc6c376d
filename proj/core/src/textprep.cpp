#include "deltamine/textprep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace deltamine::text {

namespace {

bool is_ws(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == U' ';
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_letter(char32_t c) {
  if (c < 128) return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
  return c != U' ' && c != U'‘' && c != U'’' && c != U'“' && c != U'”';
}

bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'’'; }

char32_t lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  return c;
}

std::string lower_utf8(std::u32string_view s) {
  std::u32string out(s);
  for (auto& c : out) c = lower(c);
  return utf8_encode(out);
}

// words that may precede a period without ending the sentence
const std::array<std::string_view, 30> kAbbrev = {
    "mr",  "mrs", "ms",  "dr",   "prof", "sr",  "jr",   "st",  "vs",  "etc",
    "e.g", "i.e", "fig", "eq",   "no",   "inc", "ltd",  "co",  "u.s", "u.k",
    "a.m", "p.m", "dept", "est", "capt", "gen", "col",  "sgt", "rev", "approx"};

bool is_abbreviation(const std::u32string& text, std::size_t period) {
  // read letters and internal dots backwards from the period
  std::size_t end = period;
  std::size_t begin = end;
  while (begin > 0 && (is_letter(text[begin - 1]) || text[begin - 1] == U'.')) --begin;
  if (begin == end) return false;
  std::string word = lower_utf8(std::u32string_view(text).substr(begin, end - begin));
  return std::find(kAbbrev.begin(), kAbbrev.end(), word) != kAbbrev.end();
}

bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'”' || c == U'’';
}

}  // namespace

std::u32string utf8_decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const unsigned char b0 = static_cast<unsigned char>(utf8[i]);
    char32_t cp = 0;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 >> 4) == 0xE) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 >> 3) == 0x1E) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw std::invalid_argument("utf8_decode: invalid leading byte");
    }
    if (i + len > utf8.size()) throw std::invalid_argument("utf8_decode: truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char b = static_cast<unsigned char>(utf8[i + k]);
      if ((b >> 6) != 0x2) throw std::invalid_argument("utf8_decode: invalid continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::vector<Span> split_sentences(const std::u32string& text) {
  std::vector<Span> spans;
  const std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t i = 0;

  auto flush = [&](std::size_t end) {
    // trim surrounding whitespace; drop whitespace-only segments
    std::size_t b = start;
    std::size_t e = end;
    while (b < e && is_ws(text[b])) ++b;
    while (e > b && is_ws(text[e - 1])) --e;
    if (b < e) spans.push_back({b, e});
    start = end;
  };

  while (i < n) {
    const char32_t c = text[i];
    if (c == U'?' || c == U'!') {
      ++i;
      while (i < n && (text[i] == U'?' || text[i] == U'!' || text[i] == U'.')) ++i;
      while (i < n && is_closer(text[i])) ++i;
      flush(i);
      continue;
    }
    if (c == U'.') {
      // decimals and abbreviations do not end a sentence
      const bool decimal = i + 1 < n && is_digit(text[i + 1]) && i > 0 && is_digit(text[i - 1]);
      if (!decimal && !is_abbreviation(text, i)) {
        ++i;
        while (i < n && (text[i] == U'.' || text[i] == U'?' || text[i] == U'!')) ++i;
        while (i < n && is_closer(text[i])) ++i;
        flush(i);
        continue;
      }
    }
    ++i;
  }
  flush(n);
  return spans;
}

std::vector<Span> split_sentences(std::string_view utf8) {
  return split_sentences(utf8_decode(utf8));
}

std::vector<Token> tokenize(const std::u32string& text, std::size_t offset) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  std::size_t i = 0;

  auto emit = [&](std::size_t b, std::size_t e) {
    if (b >= e) return;
    Token t;
    std::u32string surf = text.substr(b, e - b);
    for (auto& ch : surf) ch = lower(ch);
    t.surface = utf8_encode(surf);
    t.lemma = lemma_of(t.surface);
    t.span = {offset + b, offset + e};
    tokens.push_back(std::move(t));
  };

  while (i < n) {
    const char32_t c = text[i];
    if (is_ws(c)) {
      ++i;
      continue;
    }
    if (is_letter(c) || is_digit(c)) {
      std::size_t b = i;
      std::size_t apos = std::u32string::npos;
      while (i < n) {
        if (is_letter(text[i]) || is_digit(text[i])) {
          ++i;
        } else if (is_apostrophe(text[i]) && i + 1 < n && is_letter(text[i + 1]) && i > b) {
          if (apos == std::u32string::npos) apos = i;
          ++i;
        } else {
          break;
        }
      }
      if (apos != std::u32string::npos) {
        std::u32string tail = text.substr(apos + 1, i - apos - 1);
        for (auto& ch : tail) ch = lower(ch);
        const bool nt = tail == U"t" && apos > b && lower(text[apos - 1]) == U'n';
        static const std::array<std::u32string, 6> kClitics = {U"s", U"re", U"ve",
                                                               U"ll", U"d", U"m"};
        if (nt) {
          emit(b, apos - 1);     // "do"
          emit(apos - 1, i);     // "n't"
        } else if (std::find(kClitics.begin(), kClitics.end(), tail) != kClitics.end()) {
          emit(b, apos);  // "he"
          emit(apos, i);  // "'s"
        } else {
          emit(b, i);  // o'clock
        }
      } else {
        emit(b, i);
      }
      continue;
    }
    // single punctuation character
    emit(i, i + 1);
    ++i;
  }
  return tokens;
}

std::vector<Token> tokenize(std::string_view utf8) { return tokenize(utf8_decode(utf8), 0); }

std::string lemma_of(std::string_view w) {
  std::string s(w);
  auto ends = [&](std::string_view suf) {
    return s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (s.size() > 4 && ends("ies")) return s.substr(0, s.size() - 3) + "y";
  if (s.size() > 4 && (ends("ses") || ends("xes") || ends("zes") || ends("ches") || ends("shes")))
    return s.substr(0, s.size() - 2);
  if (s.size() > 3 && ends("s") && !ends("ss") && !ends("us") && !ends("is"))
    return s.substr(0, s.size() - 1);
  return s;
}

namespace {
const std::array<std::string_view, 127> kStopwords = {
    "a",       "about",   "above",  "after",   "again",  "against", "all",    "am",
    "an",      "and",     "any",    "are",     "as",     "at",      "be",     "because",
    "been",    "before",  "being",  "below",   "between", "both",   "but",    "by",
    "can",     "did",     "do",     "does",    "doing",  "down",    "during", "each",
    "few",     "for",     "from",   "further", "had",    "has",     "have",   "having",
    "he",      "her",     "here",   "hers",    "herself", "him",    "himself", "his",
    "how",     "i",       "if",     "in",      "into",   "is",      "it",     "its",
    "itself",  "just",    "me",     "more",    "most",   "my",      "myself", "no",
    "nor",     "not",     "now",    "of",      "off",    "on",      "once",   "only",
    "or",      "other",   "our",    "ours",    "ourselves", "out",  "over",   "own",
    "same",    "she",     "should", "so",      "some",   "such",    "than",   "that",
    "the",     "their",   "theirs", "them",    "themselves", "then", "there", "these",
    "they",    "this",    "those",  "through", "to",     "too",     "under",  "until",
    "up",      "very",    "was",    "we",      "were",   "what",    "when",   "where",
    "which",   "while",   "who",    "whom",    "why",    "will",    "with",   "you",
    "your",    "yours",   "yourself", "yourselves", "n't", "'s",    "'re"};
}  // namespace

bool is_stopword(std::string_view word) {
  return std::find(kStopwords.begin(), kStopwords.end(), word) != kStopwords.end();
}

std::span<const std::string_view> stopword_list() { return kStopwords; }

std::uint64_t stopword_list_hash() {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&](char c) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  };
  for (const auto& w : kStopwords) {
    for (char c : w) mix(c);
    mix('\n');
  }
  return h;
}

AnalyzedThread analyze_thread(const corpus::Thread& thread, const PosTagger* tagger) {
  AnalyzedThread out;
  out.thread_id = thread.thread_id;
  for (const auto& c : thread.comments) {
    out.comments.push_back(analyze_comment(c.id, c.body, c.karma, c.delta_awarded, tagger));
  }
  return out;
}

std::vector<AnalyzedThread> analyze_threads(std::span<const corpus::Thread> threads,
                                            const PosTagger* tagger) {
  std::vector<AnalyzedThread> out;
  out.reserve(threads.size());
  for (const auto& t : threads) out.push_back(analyze_thread(t, tagger));
  return out;
}

AnalyzedComment analyze_comment(const std::string& id, const std::string& body, long karma,
                                bool delta_awarded, const PosTagger* tagger) {
  AnalyzedComment out;
  out.id = id;
  out.body = body;
  out.karma = karma;
  out.delta_awarded = delta_awarded;
  const std::u32string text = utf8_decode(body);
  for (const Span& span : split_sentences(text)) {
    Sentence s;
    s.span = span;
    s.tokens = tokenize(text.substr(span.begin, span.end - span.begin), span.begin);
    if (s.tokens.empty()) continue;
    pos_tag(s.tokens, tagger);
    out.sentences.push_back(std::move(s));
  }
  return out;
}

}  // namespace deltamine::text
