#pragma once

// Seeded generator of labelled micro-task corpora. Each category owns 15
// signature words (3 verbs, 12 nouns) disjoint from every other category and
// from a shared 100-word noise pool. A description has 20-40 word tokens, 60%
// (rounded) drawn from the signature set and the rest from the noise pool;
// every sentence opens with one of the category's verbs.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace mtsim::synth {

struct CategoryBank {
  std::string_view name;
  std::array<std::string_view, 3> verbs;
  std::array<std::string_view, 12> nouns;
  std::array<std::string_view, 2> hosts;
  double payment;         // mean, USD
  double time_to_finish;  // mean, minutes
  double list_chance;     // probability of rendering trailing sentences as a list
};

inline constexpr std::array<CategoryBank, 6> kBanks = {{
    {"Sign up",
     {"register", "confirm", "verify"},
     {"account", "email", "password", "username", "inbox", "captcha", "newsletter", "membership", "birthday",
      "registration", "login", "signup"},
     {"accounts.example.org", "mail.example.net"},
     0.15, 5.0, 0.3},
    {"Search, Click, Engage",
     {"search", "click", "browse"},
     {"keyword", "banner", "homepage", "advert", "sponsor", "engine", "ranking", "query", "toolbar", "snippet",
      "directory", "result"},
     {"www.google.com", "search.example.com"},
     0.10, 3.0, 0.2},
    {"Youtube",
     {"watch", "subscribe", "comment"},
     {"video", "channel", "playlist", "vlogger", "trailer", "thumbnail", "episode", "viewer", "stream", "uploader",
      "clip", "vlog"},
     {"www.youtube.com", "vimeo.com"},
     0.20, 8.0, 0.4},
    {"Mobile Applications",
     {"download", "install", "rate"},
     {"app", "smartphone", "tablet", "android", "iphone", "appstore", "screenshot", "permission", "launcher",
      "device", "gadget", "firmware"},
     {"play.google.com", "apps.apple.com"},
     0.40, 12.0, 0.6},
    {"Facebook",
     {"share", "follow", "post"},
     {"fanpage", "friend", "timeline", "photo", "wall", "feed", "follower", "hashtag", "selfie", "album", "status",
      "tag"},
     {"www.facebook.com", "twitter.com"},
     0.12, 4.0, 0.3},
    {"Promotion",
     {"write", "promote", "recommend"},
     {"article", "blog", "forum", "review", "product", "brand", "testimonial", "paragraph", "slogan", "opinion",
      "discount", "coupon"},
     {"blog.example.com", "forum.example.org"},
     0.60, 20.0, 0.5},
}};

/// Shared filler words: no stopwords, no verb-trigger words, disjoint from
/// every signature set.
inline constexpr std::array<std::string_view, 100> kNoisePool = {
    "task",     "job",        "worker",      "payment",     "time",      "hour",      "day",        "week",
    "details",  "instructions", "required", "proof",       "valid",     "final",     "simple",     "easy",
    "quick",    "careful",    "correct",     "exact",       "unique",    "new",       "real",       "full",
    "small",    "large",      "short",      "long",        "first",     "last",      "next",       "main",
    "extra",    "online",     "free",       "single",      "daily",     "random",    "public",     "private",
    "original", "english",    "different",  "important",   "regular", "specific",  "standard",   "basic",
    "general",  "total",      "bonus",      "reward",      "feedback",    "submission", "text",      "link",
    "button",   "section",    "option",     "deadline",      "number",    "code",      "name",       "title",
    "information", "step",    "note",       "example",     "answer",    "question",  "user",       "member",
    "person",   "people",     "country",    "world",       "today",     "tomorrow",  "morning",    "evening",
    "success",  "quality",    "report",     "rule",        "policy",    "support",   "team",       "service",
    "system",   "content",    "image",      "file",        "data",      "screen",    "page",       "site",
    "minute",   "detail",     "manual",  "carefully"};

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t categories = 5;
  std::size_t per_category = 60;
};

namespace detail {

template <typename T, std::size_t N>
const T& pick(const std::array<T, N>& a, Rng& rng) {
  return a[uniform_index(rng, N)];
}

inline std::string capitalize(std::string_view w) {
  std::string s(w);
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

inline double round_to(double v, double step) { return std::round(v / step) * step; }

/// Gaussian-ish draw: mean of three uniforms, scaled to +-spread around mean.
inline double around(Rng& rng, double mean, double spread) {
  const double u = (uniform01(rng) + uniform01(rng) + uniform01(rng)) / 3.0;
  return mean * (1.0 + spread * (2.0 * u - 1.0));
}

inline MicroTask make_task(const CategoryBank& bank, std::size_t cat_index, Rng& rng) {
  const std::size_t n = 20 + uniform_index(rng, 21);
  const std::size_t n_sig = static_cast<std::size_t>(std::lround(0.6 * static_cast<double>(n)));
  const std::size_t n_sent = (n + 7) / 8;

  // Non-initial tokens, shuffled, then dealt into sentences.
  std::vector<std::string_view> body;
  for (std::size_t i = n_sent; i < n_sig; ++i) {
    const std::size_t j = uniform_index(rng, 15);
    body.push_back(j < 3 ? bank.verbs[j] : bank.nouns[j - 3]);
  }
  for (std::size_t i = n_sig; i < n; ++i) body.push_back(pick(kNoisePool, rng));
  shuffle(body, rng);

  std::vector<std::string> sentences;
  std::size_t next = 0;
  for (std::size_t s = 0; s < n_sent; ++s) {
    const std::size_t len = n / n_sent + (s < n % n_sent ? 1 : 0);
    std::string sentence = capitalize(pick(bank.verbs, rng));
    for (std::size_t w = 1; w < len; ++w) {
      sentence += ' ';
      sentence += body[next++];
    }
    sentences.push_back(sentence + ".");
  }

  // Optional link around one sentence's last word.
  if (uniform01(rng) < 0.6) {
    const std::size_t s = uniform_index(rng, sentences.size());
    auto& sentence = sentences[s];
    const auto space = sentence.rfind(' ');
    if (space != std::string::npos) {
      const std::string host = uniform01(rng) < 0.7 ? std::string(pick(bank.hosts, rng)) : "bit.ly";
      const std::string word = sentence.substr(space + 1, sentence.size() - space - 2);
      sentence = sentence.substr(0, space + 1) + "<a href=\"https://" + host + "/t/" + std::to_string(uniform_index(rng, 1000)) +
                 "\">" + word + "</a>.";
    }
  }

  std::string html;
  std::size_t list_from = sentences.size();
  if (sentences.size() >= 3 && uniform01(rng) < bank.list_chance) list_from = 1 + uniform_index(rng, sentences.size() - 1);
  for (std::size_t s = 0; s < list_from; ++s) html += "<p>" + sentences[s] + "</p>";
  if (list_from < sentences.size()) {
    html += "<ul>";
    for (std::size_t s = list_from; s < sentences.size(); ++s) html += "<li>" + sentences[s] + "</li>";
    html += "</ul>";
  }

  MicroTask t;
  t.title = capitalize(pick(bank.verbs, rng)) + " " + std::string(pick(bank.nouns, rng)) + " " +
            std::string(pick(bank.nouns, rng));
  t.description_html = std::move(html);
  t.proof = uniform01(rng) < 0.5 ? "Send a screen capture." : "Send the name you used.";
  t.category = std::string(bank.name);
  t.employer = uniform01(rng) < 0.7 ? "emp" + std::to_string(cat_index) + "-" + std::to_string(uniform_index(rng, 6))
                                     : "emp-shared-" + std::to_string(uniform_index(rng, 10));
  t.payment = round_to(std::max(0.01, around(rng, bank.payment, 0.5)), 0.01);
  t.time_to_finish = std::max(1.0, std::round(around(rng, bank.time_to_finish, 0.6)));
  t.time_to_rate = static_cast<double>(1 + uniform_index(rng, 7));
  t.positions = static_cast<std::int64_t>(10 + uniform_index(rng, 491));
  t.jobs_done = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(t.positions) + 1));
  t.success_rate = round_to(0.5 + 0.5 * uniform01(rng), 0.01);
  static constexpr std::array<std::string_view, 8> countries = {"US", "GB", "DE", "IN", "CA", "AU", "FR", "PH"};
  if (uniform01(rng) < 0.5) {
    for (const auto c : countries)
      if (uniform01(rng) < 0.3) t.countries.emplace_back(c);
    std::sort(t.countries.begin(), t.countries.end());
  }
  return t;
}

}  // namespace detail

/// Tasks are generated category by category, then shuffled; ids follow the
/// final order ("synth-0001", ...). Derived fields are populated.
inline Corpus generate_synthetic_corpus(const SynthConfig& cfg = {}) {
  if (cfg.categories < 1 || cfg.categories > kBanks.size())
    throw InvalidArgument("categories must be in [1, " + std::to_string(kBanks.size()) + "]");
  if (cfg.per_category < 1) throw InvalidArgument("per_category must be at least 1");
  auto rng = make_rng(cfg.seed, 0x5eed);
  std::vector<MicroTask> tasks;
  for (std::size_t c = 0; c < cfg.categories; ++c)
    for (std::size_t i = 0; i < cfg.per_category; ++i) tasks.push_back(detail::make_task(kBanks[c], c, rng));
  shuffle(tasks, rng);
  Corpus out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%04zu", i + 1);
    tasks[i].id = id;
    tasks[i].derive();
    out.add(std::move(tasks[i]));
  }
  return out;
}

/// One JSON object per line, in corpus order.
inline std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& t : corpus.tasks) out += to_json(t).dump() + "\n";
  return out;
}

}  // namespace mtsim::synth
