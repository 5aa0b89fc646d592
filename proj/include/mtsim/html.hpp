#pragma once

// Tolerant, non-validating HTML-to-text conversion. Only tag names, list
// items, block boundaries and href attributes are interpreted; everything
// else is dropped or passed through as text.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "text.hpp"

namespace mtsim::html {

struct DocStructure {
  std::size_t bullet_count = 0;
  std::vector<std::size_t> paragraph_lengths;  // words per paragraph
  std::vector<std::size_t> line_lengths;       // code points per non-empty line
  std::vector<std::string> url_hosts;          // document order, lowercase

  bool operator==(const DocStructure&) const = default;
};

struct StrippedText {
  std::string text;
  DocStructure structure;
};

namespace detail {

inline bool ieq(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

/// Decodes the entity starting at s[0] == '&'. On success returns the
/// number of bytes consumed and writes the decoded text; returns 0 for
/// unknown or malformed references.
inline std::size_t decode_entity(std::string_view s, std::string& decoded) {
  const auto semi = s.find(';');
  if (semi == std::string_view::npos || semi < 2 || semi > 10) return 0;
  const std::string_view name = s.substr(1, semi - 1);
  decoded.clear();
  if (name[0] == '#') {
    std::uint32_t cp = 0;
    std::string_view digits = name.substr(1);
    int base = 10;
    if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
      base = 16;
      digits.remove_prefix(1);
    }
    if (digits.empty()) return 0;
    for (char c : digits) {
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (base == 16 && c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (base == 16 && c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else return 0;
      cp = cp * base + v;
      if (cp > 0x10FFFF) return 0;
    }
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    append_utf8(decoded, cp);
    return semi + 1;
  }
  if (name == "amp") decoded = "&";
  else if (name == "lt") decoded = "<";
  else if (name == "gt") decoded = ">";
  else if (name == "quot") decoded = "\"";
  else if (name == "apos") decoded = "'";
  else if (name == "nbsp") decoded = " ";
  else return 0;
  return semi + 1;
}

enum class Break { none = 0, line = 1, paragraph = 2 };

// Accumulates visible text, collapsing whitespace and folding consecutive
// breaks into the strongest one.
class Emitter {
 public:
  void space() { pending_space_ = true; }
  void brk(Break b) { pending_break_ = std::max(pending_break_, b); }

  void raw_whitespace(char c) {
    if (c == '\n') {
      ++newline_run_;
      brk(newline_run_ >= 2 ? Break::paragraph : Break::line);
    } else {
      space();
    }
  }

  void visible(std::string_view chars) {
    if (!out_.empty()) {
      if (pending_break_ == Break::paragraph) out_ += "\n\n";
      else if (pending_break_ == Break::line) out_ += '\n';
      else if (pending_space_) out_ += ' ';
    }
    pending_space_ = false;
    pending_break_ = Break::none;
    newline_run_ = 0;
    out_ += chars;
  }

  void feed_text_char(char c) {
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      raw_whitespace(c);
    } else {
      visible(std::string_view(&c, 1));
    }
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
  bool pending_space_ = false;
  Break pending_break_ = Break::none;
  int newline_run_ = 0;
};

inline Break break_for(std::string_view tag) {
  static constexpr std::string_view paragraph_tags[] = {
      "p",     "div",    "h1",      "h2",     "h3",   "h4",     "h5",    "h6",
      "ul",    "ol",     "table",   "blockquote", "pre", "section", "article", "header",
      "footer", "form",  "hr",      "dl",     "center", "main",  "nav",   "aside"};
  static constexpr std::string_view line_tags[] = {"br", "li", "tr", "dt", "dd", "td", "th"};
  for (auto t : paragraph_tags)
    if (ieq(tag, t)) return Break::paragraph;
  for (auto t : line_tags)
    if (ieq(tag, t)) return Break::line;
  return Break::none;
}

/// Extracts the value of attribute `name` from the inside of a tag.
inline std::string attribute(std::string_view tag_body, std::string_view name) {
  std::size_t i = 0;
  // skip the tag name
  while (i < tag_body.size() && !text::is_space(tag_body[i]) && tag_body[i] != '/') ++i;
  while (i < tag_body.size()) {
    while (i < tag_body.size() && (text::is_space(tag_body[i]) || tag_body[i] == '/')) ++i;
    const std::size_t key_begin = i;
    while (i < tag_body.size() && !text::is_space(tag_body[i]) && tag_body[i] != '=' &&
           tag_body[i] != '/')
      ++i;
    const std::string_view key = tag_body.substr(key_begin, i - key_begin);
    while (i < tag_body.size() && text::is_space(tag_body[i])) ++i;
    std::string_view value;
    if (i < tag_body.size() && tag_body[i] == '=') {
      ++i;
      while (i < tag_body.size() && text::is_space(tag_body[i])) ++i;
      if (i < tag_body.size() && (tag_body[i] == '"' || tag_body[i] == '\'')) {
        const char q = tag_body[i++];
        const std::size_t vb = i;
        while (i < tag_body.size() && tag_body[i] != q) ++i;
        value = tag_body.substr(vb, i - vb);
        if (i < tag_body.size()) ++i;
      } else {
        const std::size_t vb = i;
        while (i < tag_body.size() && !text::is_space(tag_body[i])) ++i;
        value = tag_body.substr(vb, i - vb);
      }
    }
    if (key.empty()) {
      ++i;
      continue;
    }
    if (ieq(key, name)) {
      std::string decoded;
      std::string out;
      for (std::size_t k = 0; k < value.size();) {
        if (value[k] == '&') {
          if (auto n = decode_entity(value.substr(k), decoded)) {
            out += decoded;
            k += n;
            continue;
          }
        }
        out += value[k++];
      }
      return out;
    }
  }
  return {};
}

/// Text after a tag-opening '<' that makes it markup.
inline bool starts_markup(std::string_view s, std::size_t lt) {
  if (lt + 1 >= s.size()) return false;
  const char c = s[lt + 1];
  return std::isalpha(static_cast<unsigned char>(c)) || c == '/' || c == '!' || c == '?';
}

// Plain output must not re-form markup or entity references, so that
// stripping the output again is the identity.
inline std::string neutralize(std::string s) {
  std::string out;
  out.reserve(s.size());
  std::string scratch;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += s[i];
    if (s[i] == '<' && starts_markup(s, i)) {
      out += ' ';
    } else if (s[i] == '&' && decode_entity(std::string_view(s).substr(i), scratch) != 0) {
      out += ' ';
    }
  }
  return out;
}

inline std::size_t count_code_points(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace detail

/// Lowercase hostname of an absolute or scheme-relative URL, or "" when the
/// URL has no host (relative paths, mailto:, javascript:, fragments).
inline std::string url_host(std::string_view url) {
  url = text::detail::trim(url);
  std::size_t pos = 0;
  const auto scheme_end = url.find("://");
  if (scheme_end != std::string_view::npos &&
      std::all_of(url.begin(), url.begin() + scheme_end, [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
      })) {
    pos = scheme_end + 3;
  } else if (url.substr(0, 2) == "//") {
    pos = 2;
  } else if (url.size() > 4 && detail::ieq(url.substr(0, 4), "www.")) {
    pos = 0;
  } else {
    return {};
  }
  std::string_view rest = url.substr(pos);
  rest = rest.substr(0, rest.find_first_of("/?#"));
  if (const auto at = rest.rfind('@'); at != std::string_view::npos) rest.remove_prefix(at + 1);
  if (!rest.empty() && rest.front() == '[') {
    rest = rest.substr(0, rest.find(']') == std::string_view::npos ? rest.size() : rest.find(']') + 1);
  } else {
    rest = rest.substr(0, rest.find(':'));
  }
  while (!rest.empty() && rest.back() == '.') rest.remove_suffix(1);
  return text::to_lower(rest);
}

/// Layout statistics of an already plain text: paragraphs are blocks
/// separated by blank lines, lines are non-empty lines.
inline DocStructure text_structure(std::string_view text) {
  DocStructure st;
  std::size_t words_in_paragraph = 0;
  bool in_paragraph = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text::detail::trim(text.substr(start, end - start));
    if (line.empty()) {
      if (in_paragraph) st.paragraph_lengths.push_back(words_in_paragraph);
      in_paragraph = false;
      words_in_paragraph = 0;
    } else {
      st.line_lengths.push_back(detail::count_code_points(line));
      words_in_paragraph += text::tokenize_sentence(line).size();
      in_paragraph = true;
    }
    start = end + 1;
  }
  if (in_paragraph) st.paragraph_lengths.push_back(words_in_paragraph);
  return st;
}

/// Converts (possibly malformed) HTML into visible text plus layout
/// metadata. Block elements yield blank-line breaks, <br>/<li> and similar
/// yield line breaks, <script>/<style> content and comments are dropped.
inline StrippedText strip_html(std::string_view raw) {
  detail::Emitter emit;
  std::size_t bullets = 0;
  std::vector<std::string> hosts;
  std::string decoded;

  std::size_t i = 0;
  while (i < raw.size()) {
    const char c = raw[i];
    if (c == '<' && detail::starts_markup(raw, i)) {
      if (raw.substr(i, 4) == "<!--") {
        const auto end = raw.find("-->", i + 4);
        i = end == std::string_view::npos ? raw.size() : end + 3;
        continue;
      }
      // Find the closing '>' outside quoted attribute values; fall back to
      // the first '>' when quotes are unbalanced.
      std::size_t j = i + 1;
      char quote = 0;
      while (j < raw.size()) {
        const char d = raw[j];
        if (quote) {
          if (d == quote) quote = 0;
        } else if (d == '"' || d == '\'') {
          quote = d;
        } else if (d == '>') {
          break;
        }
        ++j;
      }
      if (j >= raw.size()) {
        const auto gt = raw.find('>', i + 1);
        j = gt == std::string_view::npos ? raw.size() : gt;
      }
      const std::string_view body = raw.substr(i + 1, j - i - 1);
      i = j < raw.size() ? j + 1 : raw.size();

      const bool closing = !body.empty() && body[0] == '/';
      std::string_view name = closing ? body.substr(1) : body;
      std::size_t name_len = 0;
      while (name_len < name.size() && !text::is_space(name[name_len]) && name[name_len] != '/' &&
             name[name_len] != '>')
        ++name_len;
      name = name.substr(0, name_len);

      if (!closing && (detail::ieq(name, "script") || detail::ieq(name, "style"))) {
        const std::string close = "</" + text::to_lower(name);
        std::size_t k = i;
        for (; k < raw.size(); ++k) {
          if (raw[k] == '<' && detail::ieq(raw.substr(k, close.size()), close)) break;
        }
        const auto gt = raw.find('>', k);
        i = (k >= raw.size() || gt == std::string_view::npos) ? raw.size() : gt + 1;
        continue;
      }
      if (!closing && detail::ieq(name, "li")) ++bullets;
      if (!closing && detail::ieq(name, "a")) {
        const auto host = url_host(detail::attribute(body, "href"));
        if (!host.empty()) hosts.push_back(host);
      }
      const auto b = detail::break_for(name);
      if (b != detail::Break::none) emit.brk(b);
      continue;
    }
    if (c == '&') {
      if (const auto n = detail::decode_entity(raw.substr(i), decoded)) {
        for (char d : decoded) emit.feed_text_char(d);
        i += n;
        continue;
      }
    }
    emit.feed_text_char(c);
    ++i;
  }

  StrippedText out;
  out.text = detail::neutralize(emit.take());
  out.structure = text_structure(out.text);
  out.structure.bullet_count = bullets;
  out.structure.url_hosts = std::move(hosts);
  return out;
}

}  // namespace mtsim::html
