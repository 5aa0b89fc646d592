#include <gtest/gtest.h>

#include <cstdlib>

#include "mtsim/wordnet.hpp"
#include "support.hpp"

using namespace mtsim;
using namespace mtsim::wordnet;

namespace {

const WordNetGraph& mini() {
  static const WordNetGraph g = load_wordnet(testsupport::fixture("mini-wordnet"));
  return g;
}

// Copy of the fixture with one textual substitution in one file.
std::filesystem::path patched(const std::string& name, const std::string& file, const std::string& from,
                              const std::string& to) {
  const auto dir = testsupport::scratch_dir(name);
  for (const auto& e : std::filesystem::directory_iterator(testsupport::fixture("mini-wordnet")))
    std::filesystem::copy_file(e.path(), dir / e.path().filename());
  auto text = testsupport::read_text(dir / file);
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos);
  text.replace(at, from.size(), to);
  std::ofstream(dir / file, std::ios::binary) << text;
  return dir;
}

}  // namespace

TEST(WordNetLoad, FixtureCounts) {
  const auto& g = mini();
  EXPECT_EQ(g.synset_count(), 54u);
  EXPECT_EQ(g.synset_count(Pos::noun), 20u);
  EXPECT_EQ(g.synset_count(Pos::verb), 30u);
  EXPECT_EQ(g.synset_count(Pos::adj), 2u);
  EXPECT_EQ(g.synset_count(Pos::adv), 2u);
  EXPECT_EQ(g.hypernym_edge_count(), 45u);
  EXPECT_TRUE(g.has_lemma("sign_up", Pos::verb));
  EXPECT_TRUE(g.has_lemma("Sign Up", Pos::verb));
  EXPECT_FALSE(g.has_lemma("dog", Pos::verb));
}

TEST(WordNetLoad, Errors) {
  EXPECT_THROW(load_wordnet(testsupport::scratch_dir("wn-empty")), IoError);
  EXPECT_THROW(load_wordnet("/nonexistent/wordnet"), IoError);

  const auto bad_offset = patched("wn-offset", "data.noun", "00000243 03 n", "00000244 03 n");
  try {
    load_wordnet(bad_offset);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }

  const auto dangling = patched("wn-pointer", "data.noun", "@ 00000123 n", "@ 00000999 n");
  EXPECT_THROW(load_wordnet(dangling), ParseError);
}

TEST(Lemmatize, RulesAndExceptions) {
  const auto& g = mini();
  EXPECT_EQ(lemmatize("run", Pos::verb, g), "run");
  EXPECT_EQ(lemmatize("running", Pos::verb, g), "run");
  EXPECT_EQ(lemmatize("ran", Pos::verb, g), "run");
  EXPECT_EQ(lemmatize("saw", Pos::verb, g), "see");
  EXPECT_EQ(lemmatize("clicked", Pos::verb, g), "click");
  EXPECT_EQ(lemmatize("shares", Pos::verb, g), "share");
  EXPECT_EQ(lemmatize("Dogs", Pos::noun, g), "dog");
  EXPECT_EQ(lemmatize("clips", Pos::noun, g), "clip");
  EXPECT_EQ(lemmatize("xqzt", Pos::verb, g), std::nullopt);
  EXPECT_EQ(lemmatize("", Pos::noun, g), std::nullopt);
  EXPECT_EQ(lemmatize("dog", Pos::verb, g), std::nullopt);
}

TEST(WordSimilarity, PathOnFixture) {
  const auto& g = mini();
  EXPECT_EQ(word_similarity(g, "click", "click", Pos::verb), 1.0);
  EXPECT_DOUBLE_EQ(word_similarity(g, "dog", "cat", Pos::noun), 0.2);  // dog-canine-carnivore-feline-cat
  EXPECT_DOUBLE_EQ(word_similarity(g, "share", "download", Pos::verb), 0.25);
  // Separate verb roots meet under the virtual root: 2 + 2 + 2 edges.
  EXPECT_DOUBLE_EQ(word_similarity(g, "watch", "click", Pos::verb), 1.0 / 7);
  EXPECT_EQ(word_similarity(g, "dog", "xqzt", Pos::noun), 0.0);
  EXPECT_EQ(word_similarity(g, "dog", "cat", Pos::verb), 0.0);
  const char* words[] = {"click", "download", "watch", "share", "register", "rate", "comment"};
  for (auto a : words)
    for (auto b : words) {
      const double s = word_similarity(g, a, b, Pos::verb);
      EXPECT_EQ(s, word_similarity(g, b, a, Pos::verb));
      EXPECT_GT(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
}

TEST(WordSimilarity, WuPalmerOnFixture) {
  const auto& g = mini();
  // lcs carnivore at depth 4, path length 4.
  EXPECT_DOUBLE_EQ(word_similarity(g, "dog", "cat", Pos::noun, WordMeasure::wu_palmer), 8.0 / 12);
  EXPECT_EQ(word_similarity(g, "watch", "click", Pos::verb, WordMeasure::wu_palmer), 0.0);
  EXPECT_EQ(word_similarity(g, "see", "view", Pos::verb, WordMeasure::wu_palmer), 1.0);
}

TEST(WordSimilarity, ShorterPathNeverLowersScore) {
  WordNetGraph g;
  const auto r = g.add_synset(Pos::noun, 1, {"root"});
  const auto m = g.add_synset(Pos::noun, 2, {"middle"});
  const auto a = g.add_synset(Pos::noun, 3, {"alpha"});
  const auto b = g.add_synset(Pos::noun, 4, {"beta"});
  g.add_hypernym(m, r);
  g.add_hypernym(a, r);
  g.add_hypernym(b, m);
  g.index_all_lemmas();
  const double before = word_similarity(g, "alpha", "beta", Pos::noun);
  EXPECT_DOUBLE_EQ(before, 0.25);
  g.add_hypernym(b, r);
  const double after = word_similarity(g, "alpha", "beta", Pos::noun);
  EXPECT_DOUBLE_EQ(after, 1.0 / 3);
  EXPECT_GE(after, before);
  EXPECT_THROW(g.add_hypernym(a, 99), InvalidArgument);
  EXPECT_THROW(g.add_synset(Pos::noun, 1, {"dup"}), InvalidArgument);
}

TEST(WordNetFull, DistributionDictionary) {
  const char* dir = std::getenv("MTSIM_WORDNET_DIR");
  if (!dir || !*dir) GTEST_SKIP() << "MTSIM_WORDNET_DIR not set";
  const auto g = load_wordnet(dir);
  EXPECT_GT(g.synset_count(), 100000u);
  EXPECT_DOUBLE_EQ(word_similarity(g, "dog", "cat", Pos::noun), 0.2);
  EXPECT_TRUE(g.has_lemma("run", Pos::verb));
  EXPECT_EQ(lemmatize("running", Pos::verb, g), "run");
}
