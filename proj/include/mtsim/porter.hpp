#pragma once

// Porter's 1980 suffix-stripping stemmer, implemented from the original rule
// tables (steps 1a through 5b). Input is expected lowercase ASCII; other
// bytes are treated as consonants.

#include <string>
#include <string_view>

namespace mtsim::text {

namespace porter_detail {

class Stemmer {
 public:
  explicit Stemmer(std::string word) : b_(std::move(word)) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return b_;
  }

 private:
  std::string b_;

  bool cons(std::size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // m() of the stem b_[0, len): number of VC sequences.
  int measure(std::size_t len) const {
    int n = 0;
    std::size_t i = 0;
    while (i < len && cons(i)) ++i;
    while (i < len) {
      while (i < len && !cons(i)) ++i;
      if (i >= len) break;
      while (i < len && cons(i)) ++i;
      ++n;
    }
    return n;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool double_cons(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && cons(len - 1);
  }

  // *o: stem ends cvc where the final c is not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!cons(len - 1) || cons(len - 2) || !cons(len - 3)) return false;
    const char c = b_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const {
    return b_.size() >= s.size() && std::string_view(b_).substr(b_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    b_.replace(b_.size() - suffix.size(), suffix.size(), with);
  }

  // Replaces suffix with `with` when m(stem) > min_m. Returns true when the
  // suffix matched, whether or not the condition held.
  bool rule(std::string_view suffix, std::string_view with, int min_m) {
    if (!ends(suffix)) return false;
    if (measure(stem_len(suffix)) > min_m) replace_suffix(suffix, with);
    return true;
  }

  void step1a() {
    if (ends("sses")) replace_suffix("sses", "ss");
    else if (ends("ies")) replace_suffix("ies", "i");
    else if (ends("ss")) return;
    else if (ends("s")) replace_suffix("s", "");
  }

  void step1b() {
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
      return;
    }
    bool stripped = false;
    if (ends("ed") && has_vowel(stem_len("ed"))) {
      replace_suffix("ed", "");
      stripped = true;
    } else if (ends("ing") && has_vowel(stem_len("ing"))) {
      replace_suffix("ing", "");
      stripped = true;
    }
    if (!stripped) return;
    if (ends("at")) replace_suffix("at", "ate");
    else if (ends("bl")) replace_suffix("bl", "ble");
    else if (ends("iz")) replace_suffix("iz", "ize");
    else if (double_cons(b_.size())) {
      const char c = b_.back();
      if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
    } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
      b_ += 'e';
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) b_.back() = 'i';
  }

  void step2() {
    static constexpr std::string_view table[][2] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"}, {"biliti", "ble"},
    };
    for (const auto& [suffix, with] : table)
      if (rule(suffix, with, 0)) return;
  }

  void step3() {
    static constexpr std::string_view table[][2] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    for (const auto& [suffix, with] : table)
      if (rule(suffix, with, 0)) return;
  }

  void step4() {
    static constexpr std::string_view table[] = {
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
    };
    for (std::string_view suffix : table) {
      if (!ends(suffix)) continue;
      // First matching suffix decides, even when its condition fails.
      const std::size_t len = stem_len(suffix);
      if (suffix == "ion") {
        if (len > 0 && (b_[len - 1] == 's' || b_[len - 1] == 't') && measure(len) > 1)
          b_.resize(len);
        return;
      }
      if (measure(len) > 1) b_.resize(len);
      return;
    }
  }

  void step5a() {
    if (!ends("e")) return;
    const std::size_t len = stem_len("e");
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) b_.pop_back();
  }

  void step5b() {
    if (measure(b_.size()) > 1 && double_cons(b_.size()) && b_.back() == 'l') b_.pop_back();
  }
};

}  // namespace porter_detail

/// Porter stem of a lowercase word. Words of length <= 2 are returned as is.
inline std::string stem(std::string_view word) {
  return porter_detail::Stemmer(std::string(word)).run();
}

}  // namespace mtsim::text
