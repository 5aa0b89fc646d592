#include <gtest/gtest.h>

#include "mtsim/semsim.hpp"
#include "mtsim/synth.hpp"
#include "support.hpp"

using namespace mtsim;
using namespace mtsim::semsim;
using testsupport::task;

namespace {

const WordNetGraph& mini() {
  static const WordNetGraph g = wordnet::load_wordnet(testsupport::fixture("mini-wordnet"));
  return g;
}

VerbPhrase vp(std::string verb, std::vector<std::string> args) { return {std::move(verb), std::move(args), {}}; }

}  // namespace

TEST(VerbPhrases, TriggersAndArguments) {
  const auto ps = extract_verb_phrases("Sign up and confirm your email.", mini());
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].verb_lemma, "sign");
  EXPECT_TRUE(ps[0].argument_lemmas.empty());
  EXPECT_EQ(ps[0].surface, "Sign up and");
  EXPECT_EQ(ps[1].verb_lemma, "confirm");
  EXPECT_EQ(ps[1].argument_lemmas, (std::vector<std::string>{"email"}));
}

TEST(VerbPhrases, NoVerbsNoPhrases) {
  EXPECT_TRUE(extract_verb_phrases("", mini()).empty());
  EXPECT_TRUE(extract_verb_phrases("Quality assurance report", mini()).empty());
  // "watch" mid-sentence without a trigger context is not a trigger.
  const auto ps = extract_verb_phrases("Please watch the video. The app watch list.", mini());
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].verb_lemma, "watch");
}

TEST(VerbPhrases, SpanCappedAtSixWords) {
  const auto ps = extract_verb_phrases("Watch video video video video video video video.", mini());
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].argument_lemmas.size(), kMaxPhraseTokens - 1);
}

TEST(VerbPhrases, TaskUsesTitleAndDescription) {
  const auto t = task("t", "c", "<p>Then download the app.</p>", "Share video");
  const auto ps = extract_verb_phrases(t, mini());
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].verb_lemma, "share");
  EXPECT_EQ(ps[1].verb_lemma, "download");
  EXPECT_EQ(ps[1].argument_lemmas, (std::vector<std::string>{"app"}));
}

TEST(RequiredAction, IdentityAndEmpty) {
  const std::vector<VerbPhrase> a = {vp("watch", {"video"}), vp("comment", {})};
  EXPECT_DOUBLE_EQ(required_action_similarity(a, a, mini()), 1.0);
  EXPECT_EQ(required_action_similarity(a, {}, mini()), 0.0);
  EXPECT_EQ(required_action_similarity({}, {}, mini()), 0.0);
}

TEST(RequiredAction, WeightedVerbAndArgument) {
  const auto& g = mini();
  const double v = wordnet::word_similarity(g, "watch", "download", Pos::verb);
  const double n = wordnet::word_similarity(g, "video", "app", Pos::noun);
  EXPECT_DOUBLE_EQ(v, 1.0 / 7);
  const std::vector<VerbPhrase> a = {vp("watch", {"video"})}, b = {vp("download", {"app"})};
  EXPECT_NEAR(required_action_similarity(a, b, g), 0.7 * v + 0.3 * n, 1e-15);
  // Without arguments on one side only the verb counts.
  const std::vector<VerbPhrase> c = {vp("download", {})};
  EXPECT_NEAR(required_action_similarity(a, c, g), v, 1e-15);
}

TEST(RequiredAction, BestMatchIsSymmetrized) {
  const auto& g = mini();
  const std::vector<VerbPhrase> a = {vp("click", {})};
  const std::vector<VerbPhrase> b = {vp("click", {}), vp("watch", {})};
  // a->b best is 1; b->a bests are 1 and sim(watch, click) = 1/7.
  EXPECT_NEAR(required_action_similarity(a, b, g), 0.5 * (1.0 + (1.0 + 1.0 / 7) / 2), 1e-15);
  EXPECT_DOUBLE_EQ(required_action_similarity(a, b, g), required_action_similarity(b, a, g));
}

TEST(UnusualWords, RatioExample) {
  const std::vector<MicroTask> tasks = {task("a", "c", "download xqzt app now")};
  const auto df = document_frequencies(tasks);
  EXPECT_DOUBLE_EQ(unusual_word_ratio(tasks[0], df, default_wordlist()), 0.25);
  EXPECT_DOUBLE_EQ(unusual_word_ratio(tasks[0], df, Wordlist{}), 1.0);
  EXPECT_EQ(unusual_word_ratio(task("e", "c", ""), df, Wordlist{}), 0.0);
}

TEST(UnusualWords, FrequentWordsAreNotUnusual) {
  std::vector<MicroTask> tasks;
  for (int i = 0; i < 6; ++i) tasks.push_back(task(std::to_string(i), "c", "xqzt zzyv"));
  tasks.push_back(task("x", "c", "xqzt only"));
  auto df = document_frequencies(tasks);
  EXPECT_EQ(df["xqzt"], 7u);
  EXPECT_EQ(df["zzyv"], 6u);
  EXPECT_EQ(unusual_word_ratio(tasks[0], df, Wordlist{}), 0.0);
  EXPECT_DOUBLE_EQ(unusual_word_ratio(tasks.back(), df, Wordlist{}), 0.5);
}

TEST(UnusualWords, GrowingWordlistNeverRaisesRatio) {
  const auto corpus = synth::generate_synthetic_corpus({3, 2, 10});
  const auto df = document_frequencies(corpus.tasks);
  Wordlist wl;
  std::vector<double> prev(corpus.size(), 1.0);
  for (const auto w : synth::kNoisePool) {
    wl.emplace(w);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const double r = unusual_word_ratio(corpus.tasks[i], df, wl);
      EXPECT_LE(r, prev[i]);
      prev[i] = r;
    }
  }
}

TEST(Comprehensibility, SimilarityFormula) {
  FeatureStats st{std::vector<double>(kComprehensibilityDim, 0.0), std::vector<double>(kComprehensibilityDim, 2.0)};
  std::vector<double> u(kComprehensibilityDim, 1.0), v(kComprehensibilityDim, 3.0);
  EXPECT_EQ(comprehensibility_similarity(u, u, st), 1.0);
  EXPECT_DOUBLE_EQ(comprehensibility_similarity(u, v, st), 0.5);  // every z-difference is 1
  EXPECT_EQ(comprehensibility_similarity(u, v, st), comprehensibility_similarity(v, u, st));
  std::vector<double> short_v(3, 0.0);
  EXPECT_THROW(comprehensibility_similarity(u, short_v, st), InvalidArgument);
}

TEST(Comprehensibility, StatsUsePopulationStdWithFloor) {
  ComprehensibilityVector a{}, b{};
  a[0] = 1;
  b[0] = 3;
  const std::vector<ComprehensibilityVector> vs = {a, b};
  const auto st = feature_stats(vs);
  EXPECT_DOUBLE_EQ(st.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(st.stddev[0], 1.0);
  EXPECT_EQ(st.stddev[1], kStdFloor);
}

TEST(Matrices, RequiredActionProperties) {
  const std::vector<MicroTask> tasks = {
      task("a", "c", "<p>Watch the video and comment.</p>"),
      task("b", "c", "<p>Download the app, then rate it.</p>"),
      task("c", "c", "<p>Watch the video and comment.</p>"),
      task("d", "c", "<p>Nothing to do here.</p>"),
  };
  const auto m = required_action_matrix(tasks, mini());
  ASSERT_EQ(m.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.at(i, i), 1.0);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(m.at(i, j), m.at(j, i));
      EXPECT_GE(m.at(i, j), 0.0);
      EXPECT_LE(m.at(i, j), 1.0);
    }
  }
  EXPECT_DOUBLE_EQ(m.at(0, 2), 1.0);
  EXPECT_EQ(m.at(0, 3), 0.0);
  // Entries match the pairwise function and do not depend on other tasks.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      EXPECT_NEAR(m.at(i, j),
                  required_action_similarity(extract_verb_phrases(tasks[i], mini()),
                                             extract_verb_phrases(tasks[j], mini()), mini()),
                  1e-15);
  const auto sub = required_action_matrix(std::span(tasks).first(2), mini());
  EXPECT_EQ(sub.at(0, 1), m.at(0, 1));
}

TEST(Matrices, ThreadsDoNotChangeValues) {
  const auto corpus = synth::generate_synthetic_corpus({4, 3, 8});
  const auto a = required_action_matrix(corpus.tasks, mini(), {}, 1);
  const auto b = required_action_matrix(corpus.tasks, mini(), {}, 4);
  EXPECT_EQ(a.values, b.values);
  const auto c = comprehensibility_matrix(corpus.tasks, default_wordlist(), 1);
  const auto d = comprehensibility_matrix(corpus.tasks, default_wordlist(), 3);
  EXPECT_EQ(c.values, d.values);
  EXPECT_EQ(c.task_ids.front(), corpus.tasks.front().id);
}

TEST(Matrices, ComprehensibilityMatchesPairFunction) {
  const auto corpus = synth::generate_synthetic_corpus({9, 2, 5});
  const auto m = comprehensibility_matrix(corpus.tasks, default_wordlist());
  const auto df = document_frequencies(corpus.tasks);
  std::vector<ComprehensibilityVector> vs;
  for (const auto& t : corpus.tasks) vs.push_back(comprehensibility_vector(t, df, default_wordlist()));
  const auto st = feature_stats(vs);
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      EXPECT_DOUBLE_EQ(m.at(i, j), comprehensibility_similarity(vs[i], vs[j], st));
}

TEST(Matrices, DispatchAndMeasureNames) {
  const auto corpus = synth::generate_synthetic_corpus({1, 2, 3});
  SimilarityResources res;
  EXPECT_THROW(similarity_matrix(corpus, Measure::required_action, res), InvalidArgument);
  EXPECT_EQ(similarity_matrix(corpus, Measure::comprehensibility, res).size(), 6u);
  res.wordnet = &mini();
  EXPECT_EQ(similarity_matrix(corpus, Measure::required_action, res).measure, Measure::required_action);
  for (auto m : {Measure::required_action, Measure::comprehensibility}) EXPECT_EQ(parse_measure(name(m)), m);
  EXPECT_THROW(parse_measure("cosine"), InvalidArgument);
}
