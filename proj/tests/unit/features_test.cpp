#include <gtest/gtest.h>

#include <cmath>

#include "mtsim/features.hpp"
#include "mtsim/rng.hpp"
#include "support.hpp"

using namespace mtsim;
using namespace mtsim::features;
using testsupport::task;

TEST(FeatureSets, ParseAndLabel) {
  EXPECT_EQ(FeatureSets::parse("structural,factual").label(), "factual+structural");
  EXPECT_EQ(FeatureSets::parse("content+semantic").size(), 2u);
  EXPECT_THROW(FeatureSets::parse("contents"), InvalidArgument);
  EXPECT_THROW(FeatureSets::parse(""), InvalidArgument);
}

TEST(FeatureSets, FifteenCombinationsSinglesFirst) {
  const auto all = all_combinations();
  ASSERT_EQ(all.size(), 15u);
  EXPECT_EQ(all[0].label(), "factual");
  EXPECT_EQ(all[3].label(), "semantic");
  EXPECT_EQ(all[4].label(), "factual+content");
  EXPECT_EQ(all[14].label(), "factual+content+structural+semantic");
}

TEST(Readability, GunningFogOracle) {
  EXPECT_DOUBLE_EQ(gunning_fog(20, 2, 2), 8.0);
  EXPECT_EQ(gunning_fog(20, 2, 2), 8.0);
  EXPECT_EQ(gunning_fog(0, 0, 0), 0.0);
  EXPECT_NEAR(gunning_fog(100, 5, 10), 0.4 * (20 + 10), 1e-12);
}

TEST(Readability, LexicalDiversityCapped) {
  const auto toks = text::tokenize("a b a b c");
  EXPECT_DOUBLE_EQ(lexical_diversity(toks), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(lexical_diversity(toks, 2), 1.0);
  EXPECT_EQ(lexical_diversity({}), 0.0);
}

TEST(Structural, HandComputedColumns) {
  const auto t = task("s", "c", "<p>Click the button, then wait.</p><ul><li>Open it.</li><li>Read everything.</li></ul>");
  const auto f = structural_features(t);
  // text: "Click the button, then wait.\n\nOpen it.\nRead everything."
  EXPECT_EQ(f[0], 9.0);                          // words
  EXPECT_EQ(f[1], 2.0);                          // bullets
  EXPECT_DOUBLE_EQ(f[2], 3.0);                   // 9 words / 3 sentences
  EXPECT_DOUBLE_EQ(f[3], 1.0 / 3.0);             // commas per sentence
  EXPECT_DOUBLE_EQ(f[4], 42.0 / 9.0);            // chars per word
  EXPECT_DOUBLE_EQ(f[5], 4.5);                   // paragraphs of 5 and 4 words
  EXPECT_DOUBLE_EQ(f[6], (28.0 + 8 + 16) / 3);   // line lengths
  EXPECT_DOUBLE_EQ(f[7], gunning_fog(9, 3, 1));  // "everything" has 3 syllables
  EXPECT_DOUBLE_EQ(f[8], 1.0);
}

TEST(Structural, EmptyDescriptionIsAllZero) {
  const auto f = structural_features(task("e", "c", ""));
  for (double v : f) EXPECT_EQ(v, 0.0);
}

namespace {

std::string random_document(Rng& rng) {
  static const std::vector<std::string> words = {"click",  "register", "the",    "email",  "account", "video",
                                                 "please", "download", "carefully", "application", "a",
                                                 "confirmation", "link", "bonus", "quality", "it", "and"};
  std::string html;
  std::size_t total = 0;
  while (total < 100 + uniform_index(rng, 60)) {
    const bool list = uniform01(rng) < 0.3;
    html += list ? "<ul>" : "<p>";
    const std::size_t sentences = 1 + uniform_index(rng, 3);
    for (std::size_t s = 0; s < sentences; ++s) {
      const std::size_t n = 3 + uniform_index(rng, 10);
      std::string sentence;
      for (std::size_t w = 0; w < n; ++w) {
        if (w) sentence += uniform01(rng) < 0.1 ? ", " : " ";
        sentence += words[uniform_index(rng, words.size())];
      }
      sentence += ".";
      total += n;
      html += list ? "<li>" + sentence + "</li>" : sentence + " ";
    }
    html += list ? "</ul>" : "</p>";
  }
  return html;
}

}  // namespace

// Duplicating a document doubles the two count columns and leaves the seven
// averaged columns unchanged (lexical diversity needs at least 100 tokens).
TEST(Structural, DuplicationInvariance) {
  auto rng = make_rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto html = random_document(rng);
    const auto once = structural_features(task("a", "c", html));
    const auto twice = structural_features(task("b", "c", html + html));
    ASSERT_GE(once[0], 100.0);
    EXPECT_EQ(twice[0], 2 * once[0]) << html;
    EXPECT_EQ(twice[1], 2 * once[1]) << html;
    for (std::size_t f = 2; f < 9; ++f) EXPECT_NEAR(twice[f], once[f], 1e-12) << kStructuralColumns[f] << "\n" << html;
  }
}

TEST(Content, NgramsStayInsideSentences) {
  const auto t = task("n", "c", "Click links. Watch videos", "");
  const auto g = document_ngrams(t, 1, 2);
  EXPECT_EQ(g, (std::vector<std::string>{"click", "click link", "link", "watch", "watch video", "video"}));
}

// Toy corpus: "apple banana", "apple cherry", "banana cherry cherry".
// Every term has df 2 of 3, so idf = ln(3/2).
TEST(Content, TfIdfOracle) {
  const std::vector<MicroTask> docs = {task("1", "c", "apple banana"), task("2", "c", "apple cherry"),
                                       task("3", "c", "banana cherry cherry")};
  ContentConfig cfg;
  cfg.max_n = 1;
  cfg.min_df = 1;
  const auto model = fit_content_model(docs, cfg);
  EXPECT_EQ(model.columns(), (std::vector<std::string>{"appl", "banana", "cherri"}));
  const double idf = std::log(1.5);
  EXPECT_NEAR(idf, 0.405465, 1e-6);

  const auto raw = content_vector(model, docs[2], false);
  ASSERT_EQ(raw.size(), 2u);
  EXPECT_EQ(raw[0].index, 1u);
  EXPECT_NEAR(raw[0].value, idf, 1e-12);
  EXPECT_NEAR(raw[1].value, 2 * idf, 1e-12);

  const auto unit = content_vector(model, docs[2]);
  EXPECT_NEAR(unit[0].value, 1 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(unit[1].value, 2 / std::sqrt(5.0), 1e-12);
  for (const auto& d : docs) {
    double n2 = 0;
    for (const auto& e : content_vector(model, d)) n2 += e.value * e.value;
    EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-9);
  }
}

TEST(Content, TermInEveryDocumentHasZeroWeight) {
  const std::vector<MicroTask> docs = {task("1", "c", "task apple"), task("2", "c", "task banana")};
  ContentConfig cfg;
  cfg.max_n = 1;
  cfg.min_df = 1;
  const auto model = fit_content_model(docs, cfg);
  const auto v = content_vector(model, docs[0], false);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0].value, std::log(2.0), 1e-12);  // appl
  EXPECT_EQ(v[1].value, 0.0);                     // task
}

TEST(Content, MinDfAndMaxFeatures) {
  const std::vector<MicroTask> docs = {task("1", "c", "red blue green"), task("2", "c", "red blue"),
                                       task("3", "c", "red yellow")};
  ContentConfig cfg;
  cfg.max_n = 1;
  const auto model = fit_content_model(docs, cfg);
  EXPECT_EQ(model.columns(), (std::vector<std::string>{"blue", "red"}));
  cfg.max_features = 1;
  EXPECT_EQ(fit_content_model(docs, cfg).columns(), (std::vector<std::string>{"red"}));
}

TEST(Content, UnseenDocumentGivesEmptyVector) {
  const std::vector<MicroTask> docs = {task("1", "c", "alpha beta"), task("2", "c", "alpha gamma")};
  const auto model = fit_content_model(docs, {1, 1, 1, 100});
  EXPECT_TRUE(content_vector(model, task("x", "c", "zeta")).empty());
}

TEST(Factual, ColumnsAndOneHot) {
  auto a = task("a", "c", "x");
  a.employer = "e1";
  a.payment = 0.5;
  a.time_to_finish = 10;
  a.countries = {"DE", "US"};
  auto b = task("b", "c", "x");
  b.employer = "e2";
  b.time_to_finish = 0;
  const std::vector<MicroTask> train = {a, b};
  const auto vocab = FactualVocab::fit(train);
  EXPECT_EQ(vocab.columns(), (std::vector<std::string>{"payment", "time_to_rate", "time_to_finish", "positions",
                                                       "payment_per_minute", "employer=e1", "employer=e2",
                                                       "employer=other", "country=DE", "country=US",
                                                       "country=other"}));
  const auto ra = factual_features(a, vocab);
  EXPECT_DOUBLE_EQ(ra.values[4], 0.05);
  EXPECT_EQ(ra.values[5], 1.0);
  EXPECT_EQ(ra.values[8], 1.0);
  EXPECT_EQ(ra.values[9], 1.0);
  EXPECT_TRUE(factual_features(b, vocab).payment_per_minute_defaulted);

  auto c = task("c", "c", "x");
  c.employer = "new";
  c.countries = {"FR"};
  const auto rc = factual_features(c, vocab);
  EXPECT_EQ(rc.values[7], 1.0);
  EXPECT_EQ(rc.values[10], 1.0);
}

TEST(Semantic, SentimentAndEntities) {
  const auto lex = default_sentiment_lexicon();
  EXPECT_DOUBLE_EQ(sentiment_score(text::tokenize("good easy bad task"), lex), 1.0 / 3.0);
  EXPECT_EQ(sentiment_score(text::tokenize("neutral words"), lex), 0.0);
  EXPECT_EQ(named_entity_count("Visit Google and The Facebook page. Then like it"), 2u);

  std::istringstream in("# comment\nsuper\t+1\nawful\t-1\n");
  const auto custom = parse_sentiment_lexicon(in);
  EXPECT_EQ(custom.size(), 2u);
  EXPECT_EQ(custom.at("awful"), -1);
  std::istringstream bad("word 1\n");
  EXPECT_THROW(parse_sentiment_lexicon(bad), ParseError);
}

TEST(Semantic, ResourceLexiconMatchesBuiltIn) {
  EXPECT_EQ(load_sentiment_lexicon((testsupport::source_dir() / "resources" / "sentiment.tsv").string()),
            default_sentiment_lexicon());
}

TEST(Semantic, HostColumns) {
  const std::vector<MicroTask> train = {task("a", "c", "<a href='http://youtube.com/x'>v</a>")};
  const auto vocab = SemanticVocab::fit(train);
  EXPECT_EQ(vocab.columns(), (std::vector<std::string>{"host=youtube.com", "host=other", "named_entities", "sentiment"}));
  const auto v = semantic_features(task("b", "c", "<a href='http://other.org/'>x</a>"), default_sentiment_lexicon(), vocab);
  EXPECT_EQ(v, (std::vector<double>{0, 1, 0, 0}));
}

TEST(Combine, PrefixesAndChecks) {
  FeatureMatrix a({"x"}, FeatureSet::factual), b({"x"}, FeatureSet::structural);
  a.add_row(std::vector<double>{1});
  b.add_row(std::vector<double>{2});
  const std::vector<FeatureMatrix> parts = {a, b};
  const auto c = combine_features(parts);
  EXPECT_EQ(c.column_names(), (std::vector<std::string>{"factual:x", "structural:x"}));
  EXPECT_EQ(c.at(0, 1), 2.0);
  EXPECT_EQ(c.provenance().label(), "factual+structural");

  b.add_row(std::vector<double>{3});
  const std::vector<FeatureMatrix> uneven = {a, b};
  EXPECT_THROW(combine_features(uneven), InvalidArgument);
  EXPECT_THROW(a.add_row(std::vector<double>{NAN}), InvalidArgument);
}

// The content model only sees training texts: words that occur only in
// held-out tasks never become columns.
TEST(Pipeline, FitUsesTrainingTasksOnly) {
  const std::vector<MicroTask> train = {task("1", "a", "alpha beta"), task("2", "b", "alpha beta gamma")};
  const std::vector<MicroTask> held_out = {task("3", "a", "omega omega alpha")};
  PipelineConfig cfg;
  cfg.sets = FeatureSets::parse("content,structural");
  const auto p = FeaturePipeline::fit(train, cfg);
  const auto x = p.transform(held_out);
  for (const auto& c : x.column_names()) EXPECT_EQ(c.find("omega"), std::string::npos);
  EXPECT_EQ(x.rows(), 1u);
  EXPECT_EQ(x.cols(), p.content_model().vocabulary.size() + 9);
  EXPECT_EQ(x.column_names().back(), "structural:lexical_diversity");
}
