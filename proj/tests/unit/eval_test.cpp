#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "mtsim/eval.hpp"
#include "mtsim/synth.hpp"
#include "support.hpp"

using namespace mtsim;
using namespace mtsim::eval;
using features::FeatureSet;
using features::FeatureSets;
using learn::Algorithm;

namespace {

std::vector<std::string> two_classes(std::size_t a, std::size_t b) {
  std::vector<std::string> y(a, "A");
  y.insert(y.end(), b, "B");
  return y;
}

Corpus small_synth() {
  synth::SynthConfig cfg;
  cfg.categories = 3;
  cfg.per_category = 12;
  return synth::generate_synthetic_corpus(cfg);
}

}  // namespace

TEST(Folds, StratifiedSizes) {
  const auto y = two_classes(60, 40);
  const auto folds = stratified_folds(y, 10, 3);
  ASSERT_EQ(folds.size(), 10u);
  std::vector<int> seen(y.size(), 0);
  for (const auto& f : folds) {
    std::size_t a = 0, b = 0;
    for (auto i : f) {
      ++seen[i];
      (y[i] == "A" ? a : b) += 1;
    }
    EXPECT_EQ(a, 6u);
    EXPECT_EQ(b, 4u);
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Folds, SmallClassAndBalance) {
  auto y = two_classes(20, 0);
  y.insert(y.end(), 3, "rare");
  const auto folds = stratified_folds(y, 5, 1);
  std::size_t rare_folds = 0, lo = 100, hi = 0;
  for (const auto& f : folds) {
    rare_folds += std::count_if(f.begin(), f.end(), [&](auto i) { return y[i] == "rare"; }) > 0;
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
  }
  EXPECT_EQ(rare_folds, 3u);
  EXPECT_LE(hi - lo, 1u);
}

TEST(Folds, DeterministicAndSeedDependent) {
  const auto y = two_classes(30, 30);
  EXPECT_EQ(stratified_folds(y, 5, 42), stratified_folds(y, 5, 42));
  EXPECT_NE(stratified_folds(y, 5, 42), stratified_folds(y, 5, 43));
  EXPECT_THROW(stratified_folds(y, 1, 0), InvalidArgument);
  EXPECT_THROW(stratified_folds(y, 61, 0), InvalidArgument);
}

TEST(Metrics, HandComputed) {
  const std::vector<std::string> classes = {"A", "B"};
  const auto m = compute_metrics({{3, 1}, {2, 4}}, classes);
  EXPECT_DOUBLE_EQ(m.per_class[0].precision, 0.6);
  EXPECT_DOUBLE_EQ(m.per_class[0].recall, 0.75);
  EXPECT_NEAR(m.per_class[0].f1, 2.0 / 3, 1e-12);
  EXPECT_NEAR(m.per_class[1].precision, 0.8, 1e-12);
  EXPECT_NEAR(m.per_class[1].recall, 4.0 / 6, 1e-12);
  EXPECT_NEAR(m.per_class[1].f1, 2 * 0.8 * (4.0 / 6) / (0.8 + 4.0 / 6), 1e-12);
  EXPECT_NEAR(m.weighted_f1, 0.4 * m.per_class[0].f1 + 0.6 * m.per_class[1].f1, 1e-12);
  EXPECT_EQ(m.per_class[1].support, 6u);
}

TEST(Metrics, PerfectAndZeroDenominators) {
  const std::vector<std::string> classes = {"A", "B", "C"};
  const auto perfect = compute_metrics({{5, 0, 0}, {0, 5, 0}, {0, 0, 0}}, classes);
  EXPECT_EQ(perfect.weighted_f1, 1.0);
  EXPECT_EQ(perfect.per_class[2].precision, 0.0);
  EXPECT_EQ(perfect.per_class[2].f1, 0.0);
  const auto never = compute_metrics({{4, 0, 0}, {3, 0, 0}, {0, 0, 0}}, classes);
  EXPECT_EQ(never.per_class[1].precision, 0.0);
  EXPECT_EQ(never.per_class[1].f1, 0.0);
  EXPECT_EQ(compute_metrics({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, classes).weighted_f1, 0.0);
  EXPECT_THROW(compute_metrics({{1, 0}, {0, 1}}, classes), InvalidArgument);
}

TEST(CrossValidate, ConfusionCoversEveryTaskOnce) {
  const auto corpus = small_synth();
  CvConfig cfg;
  cfg.folds = 4;
  cfg.seed = 7;
  const auto r = cross_validate(corpus, FeatureSet::content, Algorithm::naive_bayes, cfg);
  EXPECT_EQ(r.total(), corpus.size());
  EXPECT_EQ(r.fold_scores.size(), 4u);
  EXPECT_EQ(r.classes, corpus.categories());
  std::size_t support = 0;
  for (const auto& pc : r.per_class) support += pc.support;
  EXPECT_EQ(support, corpus.size());
  EXPECT_NEAR(r.weighted_f1, compute_metrics(r.confusion, r.classes).weighted_f1, 1e-15);
}

TEST(CrossValidate, ConstantFeaturesGiveMajorityBaseline) {
  // Empty descriptions make every structural column 0, so Gaussian naive
  // Bayes can only follow the prior.
  Corpus corpus;
  for (int i = 0; i < 20; ++i)
    corpus.add(testsupport::task("t" + std::to_string(i), i < 12 ? "A" : "B", ""));
  CvConfig cfg;
  cfg.folds = 4;
  const auto r = cross_validate(corpus, FeatureSet::structural, Algorithm::naive_bayes, cfg);
  EXPECT_EQ(r.confusion, (Confusion{{12, 0}, {8, 0}}));
  EXPECT_NEAR(r.weighted_f1, 0.6 * 0.75, 1e-12);
}

TEST(CrossValidate, DeterministicAcrossThreads) {
  const auto corpus = small_synth();
  CvConfig cfg;
  cfg.folds = 3;
  cfg.seed = 11;
  const auto a = cross_validate(corpus, FeatureSets::parse("structural+content"), Algorithm::forest, cfg);
  cfg.threads = 3;
  const auto b = cross_validate(corpus, FeatureSets::parse("structural+content"), Algorithm::forest, cfg);
  EXPECT_EQ(a.confusion, b.confusion);
  EXPECT_EQ(a.fold_scores, b.fold_scores);
  EXPECT_EQ(a.config_echo, b.config_echo);
}

TEST(Grid, CellsEqualStandaloneRuns) {
  const auto corpus = small_synth();
  CvConfig cfg;
  cfg.folds = 3;
  cfg.seed = 5;
  const std::vector<FeatureSets> sets = {FeatureSet::factual, FeatureSets::parse("content+semantic")};
  const std::vector<Algorithm> algos = {Algorithm::knn, Algorithm::tree};
  const auto g = grid_run(corpus, sets, algos, cfg);
  ASSERT_EQ(g.cells.size(), 4u);
  for (std::size_t r = 0; r < sets.size(); ++r)
    for (std::size_t c = 0; c < algos.size(); ++c) {
      const auto solo = cross_validate(corpus, sets[r], algos[c], cfg);
      EXPECT_EQ(g.cell(r, c).confusion, solo.confusion);
      EXPECT_EQ(g.cell(r, c).sets, sets[r]);
      EXPECT_EQ(g.cell(r, c).algorithm, algos[c]);
    }
  cfg.threads = 4;
  EXPECT_EQ(to_csv(grid_run(corpus, sets, algos, cfg)), to_csv(g));
}

TEST(Grid, CsvLayout) {
  const auto corpus = small_synth();
  CvConfig cfg;
  cfg.folds = 3;
  const std::vector<FeatureSets> sets = {FeatureSet::content};
  const std::vector<Algorithm> algos = {Algorithm::naive_bayes};
  const auto csv = to_csv(grid_run(corpus, sets, algos, cfg));
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(header.rfind("feature_sets,algorithm,weighted_f1,mean_fold_f1,\"precision[", 0), 0u);
  EXPECT_EQ(row.rfind("content,naive_bayes,", 0), 0u);
  EXPECT_NE(header.find("\"f1[Search, Click, Engage]\""), std::string::npos);
  EXPECT_NE(header.find(",support[Youtube]"), std::string::npos);
}
