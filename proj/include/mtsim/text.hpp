#pragma once

// Shared text primitives: sentence splitting, tokenization, stopwords and a
// vowel-group syllable counter.

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "porter.hpp"

namespace mtsim::text {

// Frozen English stopword list. resources/stopwords.txt carries the same
// words, one per line; the test suite checks that the two stay in sync.
inline constexpr std::array<std::string_view, 151> kStopwords = {
    "a",          "about",   "above",   "after",    "again",   "against", "all",
    "am",         "an",      "and",     "any",      "are",     "as",      "at",
    "be",         "because", "been",    "before",   "being",   "below",   "between",
    "both",       "but",     "by",      "can",      "could",   "did",     "do",
    "does",       "doing",   "down",    "during",   "each",    "few",     "for",
    "from",       "further", "had",     "has",      "have",    "having",  "he",
    "her",        "here",    "hers",    "herself",  "him",     "himself", "his",
    "how",        "i",       "if",      "in",       "into",    "is",      "it",
    "its",        "itself",  "just",    "me",       "more",    "most",    "my",
    "myself",     "no",      "nor",     "not",      "now",     "of",      "off",
    "on",         "once",    "only",    "or",       "other",   "our",     "ours",
    "ourselves",  "out",     "over",    "own",      "same",    "she",     "should",
    "so",         "some",    "such",    "than",     "that",    "the",     "their",
    "theirs",     "them",    "themselves", "then",  "there",   "these",   "they",
    "this",       "those",   "through", "to",       "too",     "under",   "until",
    "up",         "very",    "was",     "we",       "were",    "what",    "when",
    "where",      "which",   "while",   "who",      "whom",    "why",     "will",
    "with",       "would",   "you",     "your",     "yours",   "yourself", "yourselves",
    "also",      "may",     "might",    "must",    "shall",   "upon",
    "yet",        "ever",    "every",   "many",     "much",    "via",     "within",
    "without",    "however", "another", "either",   "neither", "whether", "whose",
    "among",      "etc",     "s",       "t",        "don't",
};

inline const std::unordered_set<std::string_view>& stopword_set() {
  static const std::unordered_set<std::string_view> set(kStopwords.begin(), kStopwords.end());
  return set;
}

inline bool is_stopword(std::string_view lower_word) {
  return stopword_set().count(lower_word) != 0;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Bytes >= 0x80 are UTF-8 sequence bytes and count as letters so that
// non-ASCII words stay whole.
inline bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80 || c == '\'' || c == '-';
}

inline bool is_alnum_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Word (lowercased) ending just before `end`, including inner dots.
inline std::string word_before(std::string_view text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  std::string w = to_lower(text.substr(begin, end - begin));
  while (!w.empty() && !is_alnum_char(w.front())) w.erase(w.begin());
  return w;
}

inline bool is_abbreviation(std::string_view text, std::size_t dot) {
  static const std::unordered_set<std::string> known = {"e.g", "i.e", "etc", "vs", "dr", "mr",
                                                        "mrs", "ms", "st", "no"};
  const std::string w = word_before(text, dot);
  if (known.count(w)) return true;
  // Uppercase single letters are initials ("J. Smith"); lowercase ones end
  // ordinary sentences.
  if (w.size() == 1 && dot > 0 && std::isupper(static_cast<unsigned char>(text[dot - 1])))
    return true;
  return false;
}

}  // namespace detail

/// Splits plain text into sentences on '.', '!' or '?' runs followed by
/// whitespace or end of text, and on newlines. Sentences are trimmed and
/// never empty.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    const auto s = detail::trim(text.substr(start, end - start));
    if (!s.empty()) out.emplace_back(s);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      flush(i);
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i;
    while (j + 1 < text.size() && (text[j + 1] == '.' || text[j + 1] == '!' || text[j + 1] == '?'))
      ++j;
    const bool at_boundary = j + 1 == text.size() || is_space(text[j + 1]);
    if (at_boundary && !(c == '.' && j == i && detail::is_abbreviation(text, i))) {
      flush(j + 1);
    }
    i = j;
  }
  flush(text.size());
  return out;
}

struct Token {
  std::string surface;
  std::string normalized;
  std::size_t sentence_index = 0;

  bool operator==(const Token&) const = default;
};

/// Ordered tokens; sentence_index is non-decreasing.
using TokenStream = std::vector<Token>;

struct TokenizeOptions {
  bool lowercase = true;
  bool strip_punct = true;
  bool drop_stopwords = false;
  bool stem = false;
};

namespace detail {

inline void tokenize_sentence(std::string_view sentence, std::size_t index,
                              const TokenizeOptions& opt, TokenStream& out) {
  std::size_t i = 0;
  while (i < sentence.size()) {
    const char c = sentence[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (!is_word_char(c)) {
      if (!opt.strip_punct) out.push_back({std::string(1, c), std::string(1, c), index});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < sentence.size() && is_word_char(sentence[j])) ++j;
    std::string_view word = sentence.substr(i, j - i);
    // Apostrophes and hyphens are kept only inside a word.
    while (!word.empty() && !is_alnum_char(word.front())) word.remove_prefix(1);
    while (!word.empty() && !is_alnum_char(word.back())) word.remove_suffix(1);
    i = j;
    if (word.empty()) continue;

    std::string norm = opt.lowercase ? to_lower(word) : std::string(word);
    if (opt.drop_stopwords && is_stopword(to_lower(norm))) continue;
    if (opt.stem) norm = stem(norm);
    if (norm.empty()) continue;
    out.push_back({std::string(word), std::move(norm), index});
  }
}

}  // namespace detail

/// Word tokens are maximal runs of letters, digits, apostrophes and hyphens.
/// Options are applied in declaration order: lowercase, strip_punct,
/// drop_stopwords, stem.
inline TokenStream tokenize(std::string_view text, const TokenizeOptions& opt = {}) {
  TokenStream out;
  const auto sentences = split_sentences(text);
  for (std::size_t s = 0; s < sentences.size(); ++s)
    detail::tokenize_sentence(sentences[s], s, opt, out);
  return out;
}

/// Tokenizes a single sentence without re-splitting it.
inline TokenStream tokenize_sentence(std::string_view sentence, const TokenizeOptions& opt = {},
                                     std::size_t index = 0) {
  TokenStream out;
  detail::tokenize_sentence(sentence, index, opt, out);
  return out;
}

/// Vowel-group heuristic: groups of [aeiouy], minus one for a silent final
/// 'e' (kept for consonant + "le"), at least 1.
inline int count_syllables(std::string_view word) {
  std::string w;
  for (char c : word)
    if (std::isalpha(static_cast<unsigned char>(c)))
      w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (w.empty()) return 1;
  auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool prev = false;
  for (char c : w) {
    const bool v = vowel(c);
    if (v && !prev) ++groups;
    prev = v;
  }
  if (w.back() == 'e') {
    const bool consonant_le =
        w.size() >= 3 && w[w.size() - 2] == 'l' && !vowel(w[w.size() - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

}  // namespace mtsim::text
