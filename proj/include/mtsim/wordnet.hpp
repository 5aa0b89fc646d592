#pragma once

// Reader for the WordNet 3.x database files (index.*, data.*, *.exc) and
// hypernym-path word similarity.
//
// Synsets are addressed by (part of speech, byte offset in data.<pos>). The
// reader checks that every synset offset equals the byte position of its
// line and that every pointer and index entry references an existing synset.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace mtsim::wordnet {

enum class Pos : std::uint8_t { noun = 0, verb = 1, adj = 2, adv = 3 };

inline constexpr std::array<Pos, 4> kAllPos = {Pos::noun, Pos::verb, Pos::adj, Pos::adv};

inline std::string_view file_suffix(Pos p) {
  switch (p) {
    case Pos::noun: return "noun";
    case Pos::verb: return "verb";
    case Pos::adj: return "adj";
    case Pos::adv: return "adv";
  }
  return "?";
}

inline std::optional<Pos> pos_from_char(char c) {
  switch (c) {
    case 'n': return Pos::noun;
    case 'v': return Pos::verb;
    case 'a':
    case 's': return Pos::adj;
    case 'r': return Pos::adv;
    default: return std::nullopt;
  }
}

using SynsetIndex = std::uint32_t;

struct Synset {
  Pos pos = Pos::noun;
  char ss_type = 'n';
  std::uint32_t offset = 0;
  std::vector<std::string> lemmas;  // lowercase, '_' for spaces
  std::string gloss;
  std::vector<SynsetIndex> hypernyms;
};

/// Lemma normalization used throughout: lowercase, spaces to '_'.
inline std::string normalize_lemma(std::string_view word) {
  std::string out = text::to_lower(text::detail::trim(word));
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

class WordNetGraph {
 public:
  SynsetIndex add_synset(Pos pos, std::uint32_t offset, std::vector<std::string> lemmas, std::string gloss = {},
                         char ss_type = 0) {
    const auto key = offset_key(pos, offset);
    if (by_offset_.count(key)) throw InvalidArgument("duplicate synset offset " + std::to_string(offset));
    const auto id = static_cast<SynsetIndex>(synsets_.size());
    Synset s;
    s.pos = pos;
    s.ss_type = ss_type ? ss_type : "nvar"[static_cast<int>(pos)];
    s.offset = offset;
    s.lemmas = std::move(lemmas);
    s.gloss = std::move(gloss);
    synsets_.push_back(std::move(s));
    by_offset_.emplace(key, id);
    return id;
  }

  void add_hypernym(SynsetIndex child, SynsetIndex parent) {
    if (child >= synsets_.size() || parent >= synsets_.size()) throw InvalidArgument("hypernym edge references unknown synset");
    auto& h = synsets_[child].hypernyms;
    if (std::find(h.begin(), h.end(), parent) == h.end()) {
      h.push_back(parent);
      ++edge_count_;
    }
  }

  /// Adds (lemma, pos) -> synset to the lemma index, keeping sense order.
  void index_lemma(std::string_view lemma, Pos pos, SynsetIndex s) {
    if (s >= synsets_.size()) throw InvalidArgument("index entry references unknown synset");
    auto& v = lemma_index_[index_key(normalize_lemma(lemma), pos)];
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  }

  /// Indexes every lemma of every synset (for graphs built in code).
  void index_all_lemmas() {
    for (SynsetIndex i = 0; i < synsets_.size(); ++i)
      for (const auto& l : synsets_[i].lemmas) index_lemma(l, synsets_[i].pos, i);
  }

  void add_exception(Pos pos, std::string_view form, std::string_view lemma) {
    auto& v = exceptions_[static_cast<int>(pos)][normalize_lemma(form)];
    const auto l = normalize_lemma(lemma);
    if (std::find(v.begin(), v.end(), l) == v.end()) v.push_back(l);
  }

  std::optional<SynsetIndex> find(Pos pos, std::uint32_t offset) const {
    const auto it = by_offset_.find(offset_key(pos, offset));
    if (it == by_offset_.end()) return std::nullopt;
    return it->second;
  }

  /// Synsets of a lemma in sense order; empty when unknown.
  std::span<const SynsetIndex> synsets_of(std::string_view lemma, Pos pos) const {
    const auto it = lemma_index_.find(index_key(normalize_lemma(lemma), pos));
    if (it == lemma_index_.end()) return {};
    return it->second;
  }

  bool has_lemma(std::string_view lemma, Pos pos) const { return !synsets_of(lemma, pos).empty(); }

  std::span<const std::string> exceptions(Pos pos, std::string_view form) const {
    const auto& m = exceptions_[static_cast<int>(pos)];
    const auto it = m.find(std::string(form));
    if (it == m.end()) return {};
    return it->second;
  }

  const Synset& synset(SynsetIndex i) const { return synsets_.at(i); }
  std::size_t synset_count() const { return synsets_.size(); }
  std::size_t hypernym_edge_count() const { return edge_count_; }
  std::size_t lemma_entry_count() const { return lemma_index_.size(); }
  std::size_t exception_count() const {
    std::size_t n = 0;
    for (const auto& m : exceptions_) n += m.size();
    return n;
  }
  std::size_t synset_count(Pos pos) const {
    return static_cast<std::size_t>(std::count_if(synsets_.begin(), synsets_.end(), [&](const Synset& s) { return s.pos == pos; }));
  }

 private:
  std::vector<Synset> synsets_;
  std::unordered_map<std::uint64_t, SynsetIndex> by_offset_;
  std::unordered_map<std::string, std::vector<SynsetIndex>> lemma_index_;
  std::array<std::unordered_map<std::string, std::vector<std::string>>, 4> exceptions_;
  std::size_t edge_count_ = 0;

  static std::uint64_t offset_key(Pos pos, std::uint32_t offset) {
    return (static_cast<std::uint64_t>(pos) << 32) | offset;
  }
  static std::string index_key(std::string lemma, Pos pos) {
    lemma += '\x1f';
    lemma += static_cast<char>('0' + static_cast<int>(pos));
    return lemma;
  }
};

// ------------------------------------------------------------------ parsing

namespace detail {

class FieldReader {
 public:
  FieldReader(std::string_view line, std::size_t line_no, const std::string& file)
      : line_(line), line_no_(line_no), file_(file) {}

  std::string_view next() {
    while (pos_ < line_.size() && line_[pos_] == ' ') ++pos_;
    if (pos_ >= line_.size()) fail("unexpected end of line");
    const auto start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ') ++pos_;
    return line_.substr(start, pos_ - start);
  }

  template <typename T>
  T number(int base = 10) {
    const auto f = next();
    T v{};
    const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v, base);
    if (ec != std::errc() || p != f.data() + f.size()) fail("expected a number, got '" + std::string(f) + "'");
    return v;
  }

  std::string_view rest() const { return pos_ < line_.size() ? line_.substr(pos_) : std::string_view(); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(file_ + ": " + what, line_no_); }

 private:
  std::string_view line_;
  std::size_t pos_ = 0;
  std::size_t line_no_;
  const std::string& file_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("missing WordNet file '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RawPointer {
  SynsetIndex from;
  std::string symbol;
  Pos target_pos;
  std::uint32_t target_offset;
  std::size_t line_no;
  std::string file;
};

// Adjective data words may carry a syntactic marker, e.g. "big(a)".
inline std::string strip_adj_marker(std::string_view w) {
  if (w.size() > 3 && w.back() == ')') {
    const auto open = w.rfind('(');
    if (open != std::string_view::npos) return std::string(w.substr(0, open));
  }
  return std::string(w);
}

inline void parse_data_file(WordNetGraph& g, Pos pos, const std::filesystem::path& path,
                            std::vector<RawPointer>& pointers) {
  const std::string content = read_file(path);
  const std::string file = path.filename().string();
  std::size_t start = 0, line_no = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string_view line(content.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t line_offset = start;
    start = end + 1;
    if (line.empty() || line[0] == ' ') continue;  // license header

    FieldReader r(line, line_no, file);
    const auto offset = r.number<std::uint32_t>();
    if (offset != line_offset)
      r.fail("synset offset " + std::to_string(offset) + " does not match byte position " + std::to_string(line_offset));
    r.number<unsigned>();  // lex_filenum
    const auto ss_type = r.next();
    if (ss_type.size() != 1 || !pos_from_char(ss_type[0]) || *pos_from_char(ss_type[0]) != pos)
      r.fail("bad ss_type '" + std::string(ss_type) + "'");
    const auto w_cnt = r.number<unsigned>(16);
    std::vector<std::string> lemmas;
    for (unsigned i = 0; i < w_cnt; ++i) {
      lemmas.push_back(normalize_lemma(pos == Pos::adj ? strip_adj_marker(r.next()) : std::string(r.next())));
      r.number<unsigned>(16);  // lex_id
    }
    const auto p_cnt = r.number<unsigned>();
    std::vector<RawPointer> local;
    for (unsigned i = 0; i < p_cnt; ++i) {
      RawPointer p;
      p.symbol = std::string(r.next());
      p.target_offset = r.number<std::uint32_t>();
      const auto tpos = r.next();
      if (tpos.size() != 1 || !pos_from_char(tpos[0])) r.fail("bad pointer part of speech '" + std::string(tpos) + "'");
      p.target_pos = *pos_from_char(tpos[0]);
      const auto st = r.next();
      if (st.size() != 4) r.fail("bad pointer source/target field '" + std::string(st) + "'");
      p.line_no = line_no;
      p.file = file;
      local.push_back(std::move(p));
    }
    std::string_view rest = r.rest();
    const auto bar = rest.find('|');
    std::string gloss;
    if (bar != std::string_view::npos) {
      gloss = std::string(text::detail::trim(rest.substr(bar + 1)));
      rest = rest.substr(0, bar);
    }
    if (pos == Pos::verb) {
      // Frames: f_cnt then "+ f_num w_num" triples.
      FieldReader fr(rest, line_no, file);
      const auto f_cnt = fr.number<unsigned>();
      for (unsigned i = 0; i < f_cnt; ++i) {
        if (fr.next() != "+") fr.fail("expected '+' in verb frame list");
        fr.number<unsigned>();
        fr.number<unsigned>(16);
      }
    }
    const auto id = g.add_synset(pos, offset, std::move(lemmas), std::move(gloss), ss_type[0]);
    for (auto& p : local) {
      p.from = id;
      pointers.push_back(std::move(p));
    }
  }
}

inline void parse_index_file(WordNetGraph& g, Pos pos, const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const std::string file = path.filename().string();
  std::size_t start = 0, line_no = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string_view line(content.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (line.empty() || line[0] == ' ') continue;

    FieldReader r(line, line_no, file);
    const std::string lemma(r.next());
    const auto p = r.next();
    if (p.size() != 1 || !pos_from_char(p[0]) || *pos_from_char(p[0]) != pos) r.fail("bad pos '" + std::string(p) + "'");
    const auto synset_cnt = r.number<unsigned>();
    const auto p_cnt = r.number<unsigned>();
    for (unsigned i = 0; i < p_cnt; ++i) r.next();
    r.number<unsigned>();  // sense_cnt
    r.number<unsigned>();  // tagsense_cnt
    for (unsigned i = 0; i < synset_cnt; ++i) {
      const auto off = r.number<std::uint32_t>();
      const auto s = g.find(pos, off);
      if (!s) r.fail("index entry '" + lemma + "' references missing synset " + std::to_string(off));
      g.index_lemma(lemma, pos, *s);
    }
  }
}

inline void parse_exception_file(WordNetGraph& g, Pos pos, const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string form, lemma;
    if (!(fields >> form)) continue;
    bool any = false;
    while (fields >> lemma) {
      g.add_exception(pos, form, lemma);
      any = true;
    }
    if (!any) throw ParseError(path.filename().string() + ": exception entry without a lemma", line_no);
  }
}

}  // namespace detail

/// Loads a WordNet database directory. index.* and data.* are required for
/// all four parts of speech; *.exc files are optional.
inline WordNetGraph load_wordnet(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("WordNet directory '" + dir.string() + "' does not exist");
  for (auto p : kAllPos)
    for (const char* kind : {"index.", "data."}) {
      const auto f = dir / (std::string(kind) + std::string(file_suffix(p)));
      if (!std::filesystem::exists(f)) throw IoError("missing WordNet file '" + f.string() + "'");
    }
  WordNetGraph g;
  std::vector<detail::RawPointer> pointers;
  for (auto p : kAllPos) detail::parse_data_file(g, p, dir / ("data." + std::string(file_suffix(p))), pointers);
  for (const auto& ptr : pointers) {
    const auto target = g.find(ptr.target_pos, ptr.target_offset);
    if (!target)
      throw ParseError(ptr.file + ": pointer '" + ptr.symbol + "' references missing synset " +
                           std::to_string(ptr.target_offset),
                       ptr.line_no);
    if (ptr.symbol == "@" || ptr.symbol == "@i") g.add_hypernym(ptr.from, *target);
  }
  for (auto p : kAllPos) detail::parse_index_file(g, p, dir / ("index." + std::string(file_suffix(p))));
  for (auto p : kAllPos) {
    const auto f = dir / (std::string(file_suffix(p)) + ".exc");
    if (std::filesystem::exists(f)) detail::parse_exception_file(g, p, f);
  }
  return g;
}

// ---------------------------------------------------------- lemmatization

namespace detail {

struct Rule {
  std::string_view suffix, ending;
};

inline std::span<const Rule> detachment_rules(Pos pos) {
  static constexpr Rule noun[] = {{"s", ""},    {"ses", "s"},  {"xes", "x"},  {"zes", "z"},
                                  {"ches", "ch"}, {"shes", "sh"}, {"men", "man"}, {"ies", "y"}};
  static constexpr Rule verb[] = {{"s", ""},   {"ies", "y"}, {"es", "e"},  {"es", ""},
                                  {"ed", "e"}, {"ed", ""},   {"ing", "e"}, {"ing", ""}};
  static constexpr Rule adj[] = {{"er", ""}, {"est", ""}, {"er", "e"}, {"est", "e"}};
  switch (pos) {
    case Pos::noun: return noun;
    case Pos::verb: return verb;
    case Pos::adj: return adj;
    case Pos::adv: return {};
  }
  return {};
}

}  // namespace detail

/// Base form of `word` for `pos`: the word itself, then exception-list
/// entries, then suffix-detachment candidates (with an undoubled final
/// consonant as a further candidate, e.g. "running" -> "runn" -> "run").
/// Returns the first candidate present in the lemma index.
inline std::optional<std::string> lemmatize(std::string_view word, Pos pos, const WordNetGraph& wn) {
  const std::string w = normalize_lemma(word);
  if (w.empty()) return std::nullopt;
  if (wn.has_lemma(w, pos)) return w;
  for (const auto& e : wn.exceptions(pos, w))
    if (wn.has_lemma(e, pos)) return e;
  for (const auto& rule : detail::detachment_rules(pos)) {
    if (w.size() <= rule.suffix.size() || !w.ends_with(rule.suffix)) continue;
    std::string base = w.substr(0, w.size() - rule.suffix.size());
    base += rule.ending;
    if (wn.has_lemma(base, pos)) return base;
    if (rule.ending.empty() && base.size() >= 3 && base[base.size() - 1] == base[base.size() - 2] &&
        std::string_view("aeiou").find(base.back()) == std::string_view::npos) {
      base.pop_back();
      if (wn.has_lemma(base, pos)) return base;
    }
  }
  return std::nullopt;
}

// -------------------------------------------------------------- similarity

enum class WordMeasure { path, wu_palmer };

/// Hypernym distance from a synset to each of its ancestors (itself at 0).
inline std::unordered_map<SynsetIndex, std::size_t> ancestor_distances(const WordNetGraph& g, SynsetIndex s) {
  std::unordered_map<SynsetIndex, std::size_t> dist{{s, 0}};
  std::vector<SynsetIndex> frontier{s};
  std::size_t d = 0;
  while (!frontier.empty()) {
    ++d;
    std::vector<SynsetIndex> next;
    for (auto x : frontier)
      for (auto h : g.synset(x).hypernyms)
        if (dist.emplace(h, d).second) next.push_back(h);
    frontier = std::move(next);
  }
  return dist;
}

/// Shortest distance to a root (a synset without hypernyms).
inline std::size_t root_distance(const WordNetGraph& g, const std::unordered_map<SynsetIndex, std::size_t>& anc) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& [s, d] : anc)
    if (g.synset(s).hypernyms.empty()) best = std::min(best, d);
  return best;
}

/// Ancestor distances of one synset plus its shortest root distance.
struct Ancestry {
  std::unordered_map<SynsetIndex, std::size_t> distance;
  std::size_t root_distance = 0;
};

inline Ancestry ancestry(const WordNetGraph& g, SynsetIndex s) {
  Ancestry a;
  a.distance = ancestor_distances(g, s);
  a.root_distance = root_distance(g, a.distance);
  return a;
}

/// Similarity of two synsets given their ancestries. Path: 1 / (1 + L) with
/// L the shortest hypernym path through a common ancestor, all roots joined
/// under one virtual root. Wu-Palmer: 2 depth(lcs) / (L + 2 depth(lcs)) with
/// root depth 1 and the virtual root at depth 0; the lcs is the common
/// ancestor on the shortest path (deepest on ties).
inline double synset_similarity(const WordNetGraph& g, const Ancestry& a, const Ancestry& b, WordMeasure measure) {
  std::size_t best_len = std::numeric_limits<std::size_t>::max();
  std::size_t best_depth = 0;
  for (const auto& [s, d1] : a.distance) {
    const auto it = b.distance.find(s);
    if (it == b.distance.end()) continue;
    const std::size_t len = d1 + it->second;
    if (measure == WordMeasure::path) {
      best_len = std::min(best_len, len);
      continue;
    }
    if (len > best_len) continue;
    const std::size_t depth = 1 + root_distance(g, ancestor_distances(g, s));
    if (len < best_len || depth > best_depth) {
      best_len = len;
      best_depth = depth;
    }
  }
  if (measure == WordMeasure::path) {
    const std::size_t virtual_len = a.root_distance + b.root_distance + 2;
    return 1.0 / (1.0 + static_cast<double>(std::min(best_len, virtual_len)));
  }
  if (best_depth == 0) return 0.0;
  return 2.0 * static_cast<double>(best_depth) / static_cast<double>(best_len + 2 * best_depth);
}

inline double synset_similarity(const WordNetGraph& g, SynsetIndex a, SynsetIndex b, WordMeasure measure) {
  if (a == b) return 1.0;
  return synset_similarity(g, ancestry(g, a), ancestry(g, b), measure);
}

/// Best synset-pair similarity of two lemmas; 1 for identical strings, 0
/// when either lemma is unknown.
inline double word_similarity(const WordNetGraph& g, std::string_view a, std::string_view b, Pos pos,
                              WordMeasure measure = WordMeasure::path) {
  const auto na = normalize_lemma(a), nb = normalize_lemma(b);
  if (na == nb && !na.empty()) return 1.0;
  const auto sa = g.synsets_of(na, pos);
  const auto sb = g.synsets_of(nb, pos);
  if (sa.empty() || sb.empty()) return 0.0;
  std::vector<Ancestry> anc_b;
  anc_b.reserve(sb.size());
  for (auto y : sb) anc_b.push_back(ancestry(g, y));
  double best = 0.0;
  for (auto x : sa) {
    const auto anc_a = ancestry(g, x);
    for (std::size_t j = 0; j < sb.size(); ++j) {
      const double v = x == sb[j] ? 1.0 : synset_similarity(g, anc_a, anc_b[j], measure);
      best = std::max(best, v);
    }
  }
  return best;
}

}  // namespace mtsim::wordnet
