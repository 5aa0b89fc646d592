#pragma once

// Task similarity for two aspects: required action (verb phrases compared
// through WordNet) and comprehensibility (structural vector plus the ratio of
// unusual words, compared after z-scoring).

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "features.hpp"
#include "parallel.hpp"
#include "text.hpp"
#include "wordnet.hpp"

namespace mtsim::semsim {

using wordnet::Pos;
using wordnet::WordMeasure;
using wordnet::WordNetGraph;

// ------------------------------------------------------------ verb phrases

struct VerbPhrase {
  std::string verb_lemma;
  std::vector<std::string> argument_lemmas;
  std::string surface;

  bool operator==(const VerbPhrase&) const = default;
};

inline constexpr std::size_t kMaxPhraseTokens = 6;

namespace detail {

inline bool is_trigger_context(std::string_view prev_lower) {
  static const std::unordered_set<std::string_view> words = {"to", "and", "or", "then", ",", "please"};
  return words.count(prev_lower) > 0;
}

inline bool is_word(const text::Token& t) { return !t.surface.empty() && text::is_alnum_char(t.surface.front()); }

}  // namespace detail

/// Verb phrases of one piece of text. A word is a trigger when it has a verb
/// lemma and either starts its sentence or follows to/and/or/then/please or a
/// comma. A phrase runs to the next trigger or the sentence end, at most six
/// words; its arguments are the non-stopword words with a noun lemma.
inline std::vector<VerbPhrase> extract_verb_phrases(std::string_view text, const WordNetGraph& wn) {
  std::vector<VerbPhrase> out;
  text::TokenizeOptions opt;
  opt.strip_punct = false;
  const auto sentences = text::split_sentences(text);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto toks = text::tokenize_sentence(sentences[s], opt, s);
    std::vector<std::optional<std::string>> verb(toks.size());
    bool seen_word = false;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!detail::is_word(toks[i])) continue;
      const bool initial = !seen_word;
      seen_word = true;
      if (!initial && (i == 0 || !detail::is_trigger_context(toks[i - 1].normalized))) continue;
      verb[i] = wordnet::lemmatize(toks[i].normalized, Pos::verb, wn);
    }
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!verb[i]) continue;
      VerbPhrase p;
      p.verb_lemma = *verb[i];
      p.surface = toks[i].surface;
      std::size_t words = 1;
      for (std::size_t j = i + 1; j < toks.size() && !verb[j]; ++j) {
        if (!detail::is_word(toks[j])) continue;
        if (++words > kMaxPhraseTokens) break;
        p.surface += ' ';
        p.surface += toks[j].surface;
        if (text::is_stopword(toks[j].normalized)) continue;
        if (auto noun = wordnet::lemmatize(toks[j].normalized, Pos::noun, wn)) p.argument_lemmas.push_back(*noun);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Phrases of title + description.
inline std::vector<VerbPhrase> extract_verb_phrases(const MicroTask& task, const WordNetGraph& wn) {
  return extract_verb_phrases(task.title + "\n" + task.description_text, wn);
}

// --------------------------------------------------- required action measure

struct ActionConfig {
  double verb_weight = 0.7;
  WordMeasure measure = WordMeasure::path;
};

namespace detail {

/// Symmetrized best-match average; `phrase_sim(i, j)` scores A[i] vs B[j].
template <typename PhraseSim>
double best_match_average(std::size_t na, std::size_t nb, PhraseSim&& phrase_sim) {
  if (na == 0 || nb == 0) return 0.0;
  std::vector<double> best_b(nb, 0.0);
  double sum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double v = phrase_sim(i, j);
      best = std::max(best, v);
      best_b[j] = std::max(best_b[j], v);
    }
    sum_a += best;
  }
  double sum_b = 0.0;
  for (double v : best_b) sum_b += v;
  const double r = 0.5 * (sum_a / static_cast<double>(na) + sum_b / static_cast<double>(nb));
  return std::clamp(r, 0.0, 1.0);
}

/// verb_weight * verb + (1 - verb_weight) * best argument pair; the verb
/// alone when either side has no arguments.
template <typename Args, typename WordSim>
double phrase_similarity(double verb_sim, const Args& a, const Args& b, double verb_weight, WordSim&& noun_sim) {
  if (a.empty() || b.empty()) return verb_sim;
  double best = 0.0;
  for (const auto& x : a)
    for (const auto& y : b) best = std::max(best, noun_sim(x, y));
  return verb_weight * verb_sim + (1.0 - verb_weight) * best;
}

}  // namespace detail

inline double phrase_similarity(const VerbPhrase& p, const VerbPhrase& q, const WordNetGraph& wn,
                                const ActionConfig& cfg = {}) {
  const double v = wordnet::word_similarity(wn, p.verb_lemma, q.verb_lemma, Pos::verb, cfg.measure);
  return detail::phrase_similarity(v, p.argument_lemmas, q.argument_lemmas, cfg.verb_weight,
                                   [&](const std::string& x, const std::string& y) {
                                     return wordnet::word_similarity(wn, x, y, Pos::noun, cfg.measure);
                                   });
}

/// Mean best phrase match, averaged over both directions; 0 when either
/// list is empty.
inline double required_action_similarity(std::span<const VerbPhrase> a, std::span<const VerbPhrase> b,
                                         const WordNetGraph& wn, const ActionConfig& cfg = {}) {
  return detail::best_match_average(a.size(), b.size(),
                                    [&](std::size_t i, std::size_t j) { return phrase_similarity(a[i], b[j], wn, cfg); });
}

/// Word similarities for a fixed set of lemmas, computed once.
class LemmaTable {
 public:
  LemmaTable() = default;

  LemmaTable(const WordNetGraph& wn, std::vector<std::string> lemmas, Pos pos, WordMeasure measure, unsigned threads)
      : lemmas_(std::move(lemmas)) {
    std::sort(lemmas_.begin(), lemmas_.end());
    lemmas_.erase(std::unique(lemmas_.begin(), lemmas_.end()), lemmas_.end());
    const std::size_t n = lemmas_.size();
    for (std::size_t i = 0; i < n; ++i) ids_.emplace(lemmas_[i], i);
    values_.assign(n * n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
      for (std::size_t j = i; j < n; ++j) values_[i * n + j] = wordnet::word_similarity(wn, lemmas_[i], lemmas_[j], pos, measure);
    });
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) values_[i * n + j] = values_[j * n + i];
  }

  std::size_t id(const std::string& lemma) const { return ids_.at(lemma); }
  std::size_t size() const { return lemmas_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * lemmas_.size() + j]; }

 private:
  std::vector<std::string> lemmas_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<double> values_;
};

// -------------------------------------------------------- unusual words

using Wordlist = std::unordered_set<std::string>;

/// A small built-in list of everyday English words, used when no word list
/// file is given.
inline Wordlist default_wordlist() {
  static constexpr std::string_view words =
      "about above account accept access action active add address after again age ago agree all allow "
      "also always amount and answer any app apply area article ask at available back bad bank be become "
      "before begin best better between big bill blog book both box brand browse business button buy by "
      "call can card care case cash change channel check child choose city claim clear click close code "
      "come comment company complete confirm contact content continue copy correct cost could country "
      "create current customer daily data date day deal detail device did different do done down download "
      "each easy email end english enter even every example experience facebook fast feedback few file "
      "fill final find first follow for form free friend from full game get give go good google group "
      "have help here high home hour how image important include information install into it job join just "
      "keep kind know large last leave let like link list little live login long look lot low made mail "
      "make many may member message minute mobile money month more most much must name need new news next "
      "no not note now number of offer on once one online only open option or order other our out over own "
      "page paid part pay payment people person phone photo picture place play please point post price "
      "private product profile proof provide public quality question quick rate read real reason receive "
      "register report require result review right rule save say screen search second see select send "
      "service set share short should show sign simple site small social some start status step still "
      "store submit subscribe such support sure system take task team tell text than thank that the then "
      "there these thing this time title to today top true try type under upload use user valid verify "
      "very video view visit want watch way web website week well what when where which while who will "
      "with without word work worker world write year you your";
  Wordlist out;
  std::size_t start = 0;
  while (start < words.size()) {
    auto end = words.find(' ', start);
    if (end == std::string_view::npos) end = words.size();
    out.emplace(words.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

/// One word per line; blank lines and '#' comments skipped; lowercased.
inline Wordlist load_wordlist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word list: " + path.string());
  Wordlist out;
  std::string line;
  while (std::getline(in, line)) {
    const auto w = text::detail::trim(line);
    if (w.empty() || w.front() == '#') continue;
    out.insert(text::to_lower(w));
  }
  return out;
}

using DocFrequencies = std::unordered_map<std::string, std::size_t>;

/// Number of tasks whose description contains each normalized token.
inline DocFrequencies document_frequencies(std::span<const MicroTask> tasks) {
  DocFrequencies df;
  for (const auto& t : tasks) {
    std::unordered_set<std::string> seen;
    for (auto& tok : text::tokenize(t.description_text)) seen.insert(std::move(tok.normalized));
    for (const auto& w : seen) ++df[w];
  }
  return df;
}

inline constexpr std::size_t kUnusualMaxDocs = 5;

/// Fraction of description tokens seen in at most five tasks and absent from
/// the word list; 0 for an empty description.
inline double unusual_word_ratio(const MicroTask& task, const DocFrequencies& df, const Wordlist& wordlist) {
  const auto tokens = text::tokenize(task.description_text);
  if (tokens.empty()) return 0.0;
  std::size_t unusual = 0;
  for (const auto& t : tokens) {
    const auto it = df.find(t.normalized);
    const std::size_t n = it == df.end() ? 0 : it->second;
    if (n <= kUnusualMaxDocs && !wordlist.count(text::to_lower(t.surface))) ++unusual;
  }
  return static_cast<double>(unusual) / static_cast<double>(tokens.size());
}

// ------------------------------------------------------ comprehensibility

inline constexpr std::size_t kComprehensibilityDim = 10;
using ComprehensibilityVector = std::array<double, kComprehensibilityDim>;

inline ComprehensibilityVector comprehensibility_vector(const MicroTask& task, const DocFrequencies& df,
                                                        const Wordlist& wordlist) {
  ComprehensibilityVector v{};
  const auto s = features::structural_features(task);
  std::copy(s.begin(), s.end(), v.begin());
  v[9] = unusual_word_ratio(task, df, wordlist);
  return v;
}

struct FeatureStats {
  std::vector<double> mean, stddev;
};

inline constexpr double kStdFloor = 1e-9;

/// Per-feature mean and population standard deviation (floored).
inline FeatureStats feature_stats(std::span<const ComprehensibilityVector> vectors) {
  FeatureStats st;
  st.mean.assign(kComprehensibilityDim, 0.0);
  st.stddev.assign(kComprehensibilityDim, kStdFloor);
  if (vectors.empty()) return st;
  const double n = static_cast<double>(vectors.size());
  for (const auto& v : vectors)
    for (std::size_t f = 0; f < kComprehensibilityDim; ++f) st.mean[f] += v[f] / n;
  for (std::size_t f = 0; f < kComprehensibilityDim; ++f) {
    double ss = 0.0;
    for (const auto& v : vectors) ss += (v[f] - st.mean[f]) * (v[f] - st.mean[f]);
    st.stddev[f] = std::max(std::sqrt(ss / n), kStdFloor);
  }
  return st;
}

/// 1 / (1 + d) with d the Euclidean distance of the z-scored vectors divided
/// by sqrt(dimension).
inline double comprehensibility_similarity(std::span<const double> u, std::span<const double> v,
                                           const FeatureStats& stats) {
  if (u.size() != v.size() || u.size() != stats.mean.size() || u.size() != stats.stddev.size())
    throw InvalidArgument("comprehensibility vectors have mismatched dimensions");
  if (u.empty()) return 1.0;
  double ss = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const double d = (u[f] - v[f]) / stats.stddev[f];
    ss += d * d;
  }
  const double d = std::sqrt(ss) / std::sqrt(static_cast<double>(u.size()));
  return 1.0 / (1.0 + d);
}

// ---------------------------------------------------------- matrices

enum class Measure { required_action, comprehensibility };

inline std::string_view name(Measure m) {
  return m == Measure::required_action ? "required_action" : "comprehensibility";
}

inline Measure parse_measure(std::string_view s) {
  if (s == "required_action") return Measure::required_action;
  if (s == "comprehensibility") return Measure::comprehensibility;
  throw InvalidArgument("unknown measure: " + std::string(s));
}

struct SimilarityMatrix {
  std::vector<std::string> task_ids;
  std::vector<double> values;  // row-major n x n
  Measure measure = Measure::required_action;

  std::size_t size() const { return task_ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * task_ids.size() + j]; }
};

struct SimilarityResources {
  const WordNetGraph* wordnet = nullptr;
  const Wordlist* wordlist = nullptr;  // built-in list when null
  ActionConfig action;
  unsigned threads = 1;
};

namespace detail {

/// Fills the upper triangle with pair(i, j), mirrors it, sets the diagonal
/// to 1 and clamps to [0, 1].
template <typename Pair>
SimilarityMatrix fill_matrix(std::span<const MicroTask> tasks, Measure m, unsigned threads, Pair&& pair) {
  SimilarityMatrix out;
  out.measure = m;
  const std::size_t n = tasks.size();
  for (const auto& t : tasks) out.task_ids.push_back(t.id);
  out.values.assign(n * n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    out.values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) out.values[i * n + j] = std::clamp(pair(i, j), 0.0, 1.0);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out.values[i * n + j] = out.values[j * n + i];
  return out;
}

struct IndexedPhrase {
  std::size_t verb;
  std::vector<std::size_t> args;
};

}  // namespace detail

inline SimilarityMatrix required_action_matrix(std::span<const MicroTask> tasks, const WordNetGraph& wn,
                                               const ActionConfig& cfg = {}, unsigned threads = 1) {
  std::vector<std::vector<VerbPhrase>> phrases(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) { phrases[i] = extract_verb_phrases(tasks[i], wn); });

  std::vector<std::string> verbs, nouns;
  for (const auto& ps : phrases)
    for (const auto& p : ps) {
      verbs.push_back(p.verb_lemma);
      nouns.insert(nouns.end(), p.argument_lemmas.begin(), p.argument_lemmas.end());
    }
  const LemmaTable verb_table(wn, std::move(verbs), Pos::verb, cfg.measure, threads);
  const LemmaTable noun_table(wn, std::move(nouns), Pos::noun, cfg.measure, threads);

  std::vector<std::vector<detail::IndexedPhrase>> indexed(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t)
    for (const auto& p : phrases[t]) {
      detail::IndexedPhrase ip{verb_table.id(p.verb_lemma), {}};
      for (const auto& a : p.argument_lemmas) ip.args.push_back(noun_table.id(a));
      indexed[t].push_back(std::move(ip));
    }

  return detail::fill_matrix(tasks, Measure::required_action, threads, [&](std::size_t i, std::size_t j) {
    const auto& a = indexed[i];
    const auto& b = indexed[j];
    return detail::best_match_average(a.size(), b.size(), [&](std::size_t x, std::size_t y) {
      return detail::phrase_similarity(verb_table(a[x].verb, b[y].verb), a[x].args, b[y].args, cfg.verb_weight,
                                       [&](std::size_t p, std::size_t q) { return noun_table(p, q); });
    });
  });
}

inline SimilarityMatrix comprehensibility_matrix(std::span<const MicroTask> tasks, const Wordlist& wordlist,
                                                 unsigned threads = 1) {
  const auto df = document_frequencies(tasks);
  std::vector<ComprehensibilityVector> vecs(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) { vecs[i] = comprehensibility_vector(tasks[i], df, wordlist); });
  const auto stats = feature_stats(vecs);
  return detail::fill_matrix(tasks, Measure::comprehensibility, threads, [&](std::size_t i, std::size_t j) {
    return comprehensibility_similarity(vecs[i], vecs[j], stats);
  });
}

inline SimilarityMatrix similarity_matrix(const Corpus& corpus, Measure m, const SimilarityResources& res) {
  if (m == Measure::required_action) {
    if (!res.wordnet) throw InvalidArgument("required_action similarity needs a WordNet database (--wordnet)");
    return required_action_matrix(corpus.tasks, *res.wordnet, res.action, res.threads);
  }
  if (res.wordlist) return comprehensibility_matrix(corpus.tasks, *res.wordlist, res.threads);
  return comprehensibility_matrix(corpus.tasks, default_wordlist(), res.threads);
}

}  // namespace mtsim::semsim
