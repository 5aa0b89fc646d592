#pragma once

// The four task feature sets (factual, content, structural, semantic) and
// their combination into training matrices.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "text.hpp"

namespace mtsim::features {

enum class FeatureSet : unsigned { factual = 1u, content = 2u, structural = 4u, semantic = 8u };

inline constexpr std::array<FeatureSet, 4> kAllSets = {FeatureSet::factual, FeatureSet::content,
                                                       FeatureSet::structural, FeatureSet::semantic};

inline std::string_view name(FeatureSet s) {
  switch (s) {
    case FeatureSet::factual: return "factual";
    case FeatureSet::content: return "content";
    case FeatureSet::structural: return "structural";
    case FeatureSet::semantic: return "semantic";
  }
  return "?";
}

/// A set of feature-set tags, stored as a bitmask.
class FeatureSets {
 public:
  constexpr FeatureSets() = default;
  constexpr FeatureSets(FeatureSet s) : bits_(static_cast<unsigned>(s)) {}
  static constexpr FeatureSets from_bits(unsigned bits) {
    FeatureSets f;
    f.bits_ = bits & 15u;
    return f;
  }

  constexpr bool contains(FeatureSet s) const { return bits_ & static_cast<unsigned>(s); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr unsigned bits() const { return bits_; }
  constexpr bool only(FeatureSet s) const { return bits_ == static_cast<unsigned>(s); }
  constexpr FeatureSets operator|(FeatureSets o) const { return from_bits(bits_ | o.bits_); }
  constexpr FeatureSets& operator|=(FeatureSets o) { return *this = *this | o; }
  constexpr bool operator==(const FeatureSets&) const = default;

  std::size_t size() const {
    std::size_t n = 0;
    for (auto s : kAllSets) n += contains(s);
    return n;
  }

  /// "factual+content" style label in canonical order.
  std::string label() const {
    std::string out;
    for (auto s : kAllSets) {
      if (!contains(s)) continue;
      if (!out.empty()) out += '+';
      out += name(s);
    }
    return out;
  }

  /// Parses "content", "factual+structural" or "factual,structural".
  static FeatureSets parse(std::string_view spec) {
    FeatureSets out;
    std::size_t start = 0;
    while (start <= spec.size()) {
      auto end = spec.find_first_of("+,", start);
      if (end == std::string_view::npos) end = spec.size();
      const auto part = text::detail::trim(spec.substr(start, end - start));
      bool found = false;
      for (auto s : kAllSets) {
        if (part == name(s)) {
          out |= s;
          found = true;
        }
      }
      if (!found) throw InvalidArgument("unknown feature set '" + std::string(part) + "'");
      start = end + 1;
    }
    return out;
  }

 private:
  unsigned bits_ = 0;
};

/// All 15 non-empty combinations: by size, then canonical member order.
inline std::vector<FeatureSets> all_combinations() {
  std::vector<FeatureSets> out;
  for (unsigned b = 1; b < 16; ++b) out.push_back(FeatureSets::from_bits(b));
  std::stable_sort(out.begin(), out.end(), [](FeatureSets a, FeatureSets b) {
    if (a.size() != b.size()) return a.size() < b.size();
    // canonical order: compare member lists lexicographically by set index
    for (std::size_t i = 0; i < kAllSets.size(); ++i) {
      const bool ia = a.contains(kAllSets[i]), ib = b.contains(kAllSets[i]);
      if (ia != ib) return ia;
    }
    return false;
  });
  return out;
}

/// Dense row-major matrix with named columns.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> columns, FeatureSets provenance)
      : columns_(std::move(columns)), provenance_(provenance) {}

  std::size_t rows() const { return cols() == 0 ? empty_rows_ : data_.size() / cols(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& column_names() const { return columns_; }
  FeatureSets provenance() const { return provenance_; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols(), cols());
  }
  std::span<double> row(std::size_t i) { return std::span<double>(data_).subspan(i * cols(), cols()); }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  void add_row(std::span<const double> values) {
    if (values.size() != cols()) throw InvalidArgument("row width does not match column count");
    for (double v : values)
      if (!std::isfinite(v)) throw InvalidArgument("feature values must be finite");
    if (cols() == 0) ++empty_rows_;
    data_.insert(data_.end(), values.begin(), values.end());
  }

  void reserve_rows(std::size_t n) { data_.reserve(n * cols()); }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<std::string> columns_;
  std::vector<double> data_;
  FeatureSets provenance_;
  std::size_t empty_rows_ = 0;
};

// ---------------------------------------------------------------- structural

inline constexpr std::size_t kLexicalDiversityWindow = 100;

inline constexpr std::array<std::string_view, 9> kStructuralColumns = {
    "word_count",          "bullet_count",       "avg_words_per_sentence",
    "avg_commas_per_sentence", "avg_chars_per_word", "avg_paragraph_length",
    "avg_line_length",     "gunning_fog",        "lexical_diversity"};

/// 0.4 * (words/sentences + 100 * complex/words); 0 when words or
/// sentences is 0.
inline double gunning_fog(std::size_t words, std::size_t sentences, std::size_t complex_words) {
  if (words == 0 || sentences == 0) return 0.0;
  const double w = static_cast<double>(words);
  return 0.4 * (w / static_cast<double>(sentences) + 100.0 * static_cast<double>(complex_words) / w);
}

/// Type-token ratio over the first `window` normalized tokens.
inline double lexical_diversity(const text::TokenStream& tokens,
                                std::size_t window = kLexicalDiversityWindow) {
  const std::size_t n = std::min(tokens.size(), window);
  if (n == 0) return 0.0;
  std::vector<std::string_view> seen;
  seen.reserve(n);
  for (std::size_t i = 0; i < n; ++i) seen.push_back(tokens[i].normalized);
  std::sort(seen.begin(), seen.end());
  const auto types = std::unique(seen.begin(), seen.end()) - seen.begin();
  return static_cast<double>(types) / static_cast<double>(n);
}

namespace detail {

inline double mean(std::span<const std::size_t> v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (auto x : v) s += static_cast<double>(x);
  return s / static_cast<double>(v.size());
}

inline double safe_ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

}  // namespace detail

/// The nine structural columns, computed on description_text only.
inline std::array<double, 9> structural_features(const MicroTask& task) {
  const std::string& txt = task.description_text;
  const auto sentences = text::split_sentences(txt);
  const auto tokens = text::tokenize(txt);
  const double words = static_cast<double>(tokens.size());

  std::size_t commas = 0;
  for (const auto& s : sentences) commas += static_cast<std::size_t>(std::count(s.begin(), s.end(), ','));
  std::size_t chars = 0;
  std::size_t complex_words = 0;
  for (const auto& t : tokens) {
    chars += html::detail::count_code_points(t.surface);
    if (text::count_syllables(t.surface) >= 3) ++complex_words;
  }
  const double n_sent = static_cast<double>(sentences.size());
  return {
      words,
      static_cast<double>(task.structure.bullet_count),
      detail::safe_ratio(words, n_sent),
      detail::safe_ratio(static_cast<double>(commas), n_sent),
      detail::safe_ratio(static_cast<double>(chars), words),
      detail::mean(task.structure.paragraph_lengths),
      detail::mean(task.structure.line_lengths),
      gunning_fog(tokens.size(), sentences.size(), complex_words),
      lexical_diversity(tokens),
  };
}

// ------------------------------------------------------------------- factual

/// Training-fold vocabularies for the one-hot / multi-hot factual columns.
struct FactualVocab {
  std::vector<std::string> employers;  // sorted
  std::vector<std::string> countries;  // sorted

  static FactualVocab fit(std::span<const MicroTask> training) {
    std::set<std::string> e, c;
    for (const auto& t : training) {
      if (!t.employer.empty()) e.insert(t.employer);
      c.insert(t.countries.begin(), t.countries.end());
    }
    return {{e.begin(), e.end()}, {c.begin(), c.end()}};
  }

  std::vector<std::string> columns() const {
    std::vector<std::string> out = {"payment", "time_to_rate", "time_to_finish", "positions",
                                    "payment_per_minute"};
    for (const auto& e : employers) out.push_back("employer=" + e);
    out.push_back("employer=other");
    for (const auto& c : countries) out.push_back("country=" + c);
    out.push_back("country=other");
    return out;
  }
};

struct FactualRow {
  std::vector<double> values;
  bool payment_per_minute_defaulted = false;  // time_to_finish was 0
};

inline FactualRow factual_features(const MicroTask& task, const FactualVocab& vocab) {
  FactualRow row;
  auto& v = row.values;
  v.reserve(5 + vocab.employers.size() + vocab.countries.size() + 2);
  double ppm = 0.0;
  if (task.time_to_finish > 0) ppm = task.payment / task.time_to_finish;
  else row.payment_per_minute_defaulted = true;
  v = {task.payment, task.time_to_rate, task.time_to_finish, static_cast<double>(task.positions), ppm};

  const std::size_t emp_base = v.size();
  v.resize(emp_base + vocab.employers.size() + 1, 0.0);
  if (!task.employer.empty()) {
    const auto it = std::lower_bound(vocab.employers.begin(), vocab.employers.end(), task.employer);
    if (it != vocab.employers.end() && *it == task.employer)
      v[emp_base + static_cast<std::size_t>(it - vocab.employers.begin())] = 1.0;
    else
      v[emp_base + vocab.employers.size()] = 1.0;
  }
  const std::size_t c_base = v.size();
  v.resize(c_base + vocab.countries.size() + 1, 0.0);
  for (const auto& c : task.countries) {
    const auto it = std::lower_bound(vocab.countries.begin(), vocab.countries.end(), c);
    if (it != vocab.countries.end() && *it == c)
      v[c_base + static_cast<std::size_t>(it - vocab.countries.begin())] = 1.0;
    else
      v[c_base + vocab.countries.size()] = 1.0;
  }
  return row;
}

// ------------------------------------------------------------------ semantic

/// word -> polarity (+1 / -1), keys lowercase.
using SentimentLexicon = std::unordered_map<std::string, int>;

inline SentimentLexicon default_sentiment_lexicon() {
  SentimentLexicon lex;
  for (const char* w : {"good", "great", "easy", "simple", "fast", "free", "best", "nice", "happy",
                        "bonus", "quick", "fun", "excellent", "positive", "helpful"})
    lex[w] = +1;
  for (const char* w : {"bad", "difficult", "hard", "slow", "wrong", "poor", "boring", "fail",
                        "invalid", "spam", "negative", "reject", "rejected", "fake", "banned"})
    lex[w] = -1;
  return lex;
}

/// Reads `word<TAB>+1|-1` lines; '#' starts a comment line.
inline SentimentLexicon parse_sentiment_lexicon(std::istream& in) {
  SentimentLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = text::detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected word<TAB>polarity", line_no);
    const std::string word = text::to_lower(text::detail::trim(std::string_view(line).substr(0, tab)));
    const auto pol = text::detail::trim(std::string_view(line).substr(tab + 1));
    if (word.empty()) throw ParseError("empty word", line_no);
    if (pol == "+1" || pol == "1") lex[word] = +1;
    else if (pol == "-1") lex[word] = -1;
    else throw ParseError("polarity must be +1 or -1", line_no);
  }
  return lex;
}

inline SentimentLexicon load_sentiment_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sentiment lexicon '" + path + "'");
  return parse_sentiment_lexicon(in);
}

/// (pos - neg) / max(1, pos + neg) over lowercase word tokens.
inline double sentiment_score(const text::TokenStream& tokens, const SentimentLexicon& lex) {
  int pos = 0, neg = 0;
  for (const auto& t : tokens) {
    const auto it = lex.find(t.normalized);
    if (it == lex.end()) continue;
    if (it->second > 0) ++pos;
    else if (it->second < 0) ++neg;
  }
  return static_cast<double>(pos - neg) / static_cast<double>(std::max(1, pos + neg));
}

/// Capitalized tokens that are not sentence-initial and not stopwords.
inline std::size_t named_entity_count(std::string_view plain_text) {
  text::TokenizeOptions keep_case;
  keep_case.lowercase = false;
  std::size_t n = 0;
  for (const auto& sentence : text::split_sentences(plain_text)) {
    const auto toks = text::tokenize_sentence(sentence, keep_case);
    for (std::size_t i = 1; i < toks.size(); ++i) {
      const auto& s = toks[i].surface;
      if (std::isupper(static_cast<unsigned char>(s[0])) && !text::is_stopword(text::to_lower(s))) ++n;
    }
  }
  return n;
}

struct SemanticVocab {
  std::vector<std::string> hosts;  // sorted

  static SemanticVocab fit(std::span<const MicroTask> training) {
    std::set<std::string> h;
    for (const auto& t : training) h.insert(t.structure.url_hosts.begin(), t.structure.url_hosts.end());
    return {{h.begin(), h.end()}};
  }

  std::vector<std::string> columns() const {
    std::vector<std::string> out;
    for (const auto& h : hosts) out.push_back("host=" + h);
    out.push_back("host=other");
    out.push_back("named_entities");
    out.push_back("sentiment");
    return out;
  }
};

inline std::vector<double> semantic_features(const MicroTask& task, const SentimentLexicon& lexicon,
                                             const SemanticVocab& vocab) {
  std::vector<double> v(vocab.hosts.size() + 3, 0.0);
  for (const auto& h : task.structure.url_hosts) {
    const auto it = std::lower_bound(vocab.hosts.begin(), vocab.hosts.end(), h);
    if (it != vocab.hosts.end() && *it == h) v[static_cast<std::size_t>(it - vocab.hosts.begin())] = 1.0;
    else v[vocab.hosts.size()] = 1.0;
  }
  v[vocab.hosts.size() + 1] = static_cast<double>(named_entity_count(task.description_text));
  v[vocab.hosts.size() + 2] = sentiment_score(text::tokenize(task.description_text), lexicon);
  return v;
}

// ------------------------------------------------------------------- content

struct ContentConfig {
  std::size_t min_n = 1;
  std::size_t max_n = 2;
  std::size_t min_df = 2;
  std::size_t max_features = 10000;
};

/// One (column, weight) entry of a sparse vector; entries sorted by column.
struct SparseEntry {
  std::size_t index;
  double value;
  bool operator==(const SparseEntry&) const = default;
};
using SparseVector = std::vector<SparseEntry>;

/// All n-grams (with repetition) of a document: normalized, stopword-filtered,
/// stemmed tokens of title + description; n-grams never cross sentences.
inline std::vector<std::string> document_ngrams(const MicroTask& task, std::size_t min_n,
                                                std::size_t max_n) {
  text::TokenizeOptions opt;
  opt.drop_stopwords = true;
  opt.stem = true;
  const std::string doc = task.title + "\n" + task.description_text;
  const auto toks = text::tokenize(doc, opt);
  std::vector<std::string> grams;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string g;
    for (std::size_t n = 1; n <= max_n && i + n <= toks.size(); ++n) {
      if (toks[i + n - 1].sentence_index != toks[i].sentence_index) break;
      if (n > 1) g += ' ';
      g += toks[i + n - 1].normalized;
      if (n >= min_n) grams.push_back(g);
    }
  }
  return grams;
}

struct ContentModel {
  std::map<std::string, std::size_t> vocabulary;  // n-gram -> column
  std::map<std::string, std::size_t> doc_freq;    // vocabulary terms only
  std::size_t n_docs = 0;
  ContentConfig config;
  std::vector<double> idf;  // ln(n_docs / df) by column

  std::vector<std::string> columns() const {
    std::vector<std::string> out(vocabulary.size());
    for (const auto& [g, i] : vocabulary) out[i] = g;
    return out;
  }
};

/// Fits the n-gram vocabulary on training documents only. Terms need
/// doc_freq >= min_df; the vocabulary is truncated to max_features by
/// descending doc_freq with lexicographic tie-break, then columns are
/// assigned in lexicographic order.
inline ContentModel fit_content_model(std::span<const MicroTask> training, const ContentConfig& config = {}) {
  if (training.empty()) throw InvalidArgument("content model needs at least one training document");
  if (config.min_n == 0 || config.min_n > config.max_n) throw InvalidArgument("invalid n-gram range");
  std::map<std::string, std::size_t> df;
  for (const auto& t : training) {
    auto grams = document_ngrams(t, config.min_n, config.max_n);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[g];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [g, n] : df)
    if (n >= config.min_df) kept.emplace_back(g, n);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (kept.size() > config.max_features) kept.resize(config.max_features);
  std::sort(kept.begin(), kept.end());

  ContentModel model;
  model.n_docs = training.size();
  model.config = config;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    model.vocabulary.emplace(kept[i].first, i);
    model.doc_freq.emplace(kept[i].first, kept[i].second);
    model.idf.push_back(std::log(static_cast<double>(model.n_docs) / static_cast<double>(kept[i].second)));
  }
  return model;
}

/// tf * ln(n_docs / df) weights for vocabulary terms, L2-normalized when any
/// weight is nonzero.
inline SparseVector content_vector(const ContentModel& model, const MicroTask& task,
                                   bool normalize = true) {
  std::map<std::size_t, double> tf;
  for (const auto& g : document_ngrams(task, model.config.min_n, model.config.max_n)) {
    const auto it = model.vocabulary.find(g);
    if (it != model.vocabulary.end()) tf[it->second] += 1.0;
  }
  SparseVector out;
  double norm2 = 0;
  for (const auto& [idx, count] : tf) {
    const double w = count * model.idf[idx];
    out.push_back({idx, w});
    norm2 += w * w;
  }
  if (normalize && norm2 > 0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : out) e.value *= inv;
  }
  return out;
}

// --------------------------------------------------------------- combination

/// Column-wise concatenation. Columns of single-set parts are prefixed with
/// "<set>:"; parts with mixed provenance keep their names.
inline FeatureMatrix combine_features(std::span<const FeatureMatrix> parts) {
  if (parts.empty()) throw InvalidArgument("nothing to combine");
  const std::size_t rows = parts.front().rows();
  std::vector<std::string> names;
  FeatureSets prov;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw InvalidArgument("feature parts have different row counts");
    const bool single = p.provenance().size() == 1;
    for (const auto& c : p.column_names()) {
      if (single) names.push_back(p.provenance().label() + ":" + c);
      else names.push_back(c);
    }
    prov |= p.provenance();
  }
  {
    auto sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("combined column names are not unique");
  }
  FeatureMatrix out(std::move(names), prov);
  out.reserve_rows(rows);
  std::vector<double> buf;
  for (std::size_t r = 0; r < rows; ++r) {
    buf.clear();
    for (const auto& p : parts) {
      const auto row = p.row(r);
      buf.insert(buf.end(), row.begin(), row.end());
    }
    out.add_row(buf);
  }
  return out;
}

// ------------------------------------------------------------------ pipeline

struct PipelineConfig {
  FeatureSets sets = FeatureSet::content;
  ContentConfig content;
  SentimentLexicon lexicon = default_sentiment_lexicon();
};

/// Feature extraction state fitted on one training split.
class FeaturePipeline {
 public:
  static FeaturePipeline fit(std::span<const MicroTask> training, const PipelineConfig& config) {
    if (config.sets.empty()) throw InvalidArgument("no feature sets selected");
    FeaturePipeline p;
    p.config_ = config;
    if (config.sets.contains(FeatureSet::factual)) p.factual_ = FactualVocab::fit(training);
    if (config.sets.contains(FeatureSet::content)) p.content_ = fit_content_model(training, config.content);
    if (config.sets.contains(FeatureSet::semantic)) p.semantic_ = SemanticVocab::fit(training);
    return p;
  }

  FeatureMatrix transform(std::span<const MicroTask> tasks) const {
    std::vector<FeatureMatrix> parts;
    for (auto s : kAllSets)
      if (config_.sets.contains(s)) parts.push_back(extract(s, tasks));
    return combine_features(parts);
  }

  /// Count of tasks whose payment_per_minute was defaulted in the last
  /// transform call that included the factual set.
  std::size_t defaulted_payment_per_minute() const { return ppm_defaulted_; }
  const ContentModel& content_model() const { return content_; }
  const PipelineConfig& config() const { return config_; }

 private:
  PipelineConfig config_;
  FactualVocab factual_;
  ContentModel content_;
  SemanticVocab semantic_;
  mutable std::size_t ppm_defaulted_ = 0;

  FeatureMatrix extract(FeatureSet s, std::span<const MicroTask> tasks) const {
    switch (s) {
      case FeatureSet::factual: {
        FeatureMatrix m(factual_.columns(), s);
        ppm_defaulted_ = 0;
        for (const auto& t : tasks) {
          auto row = factual_features(t, factual_);
          ppm_defaulted_ += row.payment_per_minute_defaulted;
          m.add_row(row.values);
        }
        return m;
      }
      case FeatureSet::content: {
        FeatureMatrix m(content_.columns(), s);
        std::vector<double> dense(m.cols());
        for (const auto& t : tasks) {
          std::fill(dense.begin(), dense.end(), 0.0);
          for (const auto& e : content_vector(content_, t)) dense[e.index] = e.value;
          m.add_row(dense);
        }
        return m;
      }
      case FeatureSet::structural: {
        FeatureMatrix m({kStructuralColumns.begin(), kStructuralColumns.end()}, s);
        for (const auto& t : tasks) {
          const auto row = structural_features(t);
          m.add_row(row);
        }
        return m;
      }
      case FeatureSet::semantic: {
        FeatureMatrix m(semantic_.columns(), s);
        for (const auto& t : tasks) m.add_row(semantic_features(t, config_.lexicon, semantic_));
        return m;
      }
    }
    throw InvalidArgument("unknown feature set");
  }
};

}  // namespace mtsim::features
