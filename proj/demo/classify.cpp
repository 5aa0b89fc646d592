// Generates the default synthetic corpus and prints a small results
// grid: the four single feature sets against three learners.

#include <iostream>

#include "mtsim/mtsim.hpp"

int main() {
  using namespace mtsim;
  const auto corpus = synth::generate_synthetic_corpus();
  std::vector<features::FeatureSets> sets;
  for (auto s : features::kAllSets) sets.emplace_back(s);
  const learn::Algorithm algos[] = {learn::Algorithm::forest, learn::Algorithm::naive_bayes, learn::Algorithm::svm_smo};
  eval::CvConfig cfg;
  cfg.seed = 7;
  const auto grid = eval::grid_run(corpus, sets, algos, cfg);
  std::cout << eval::to_text(grid);
}
