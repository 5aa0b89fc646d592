#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"

namespace mtsim::learn {

enum class Algorithm { naive_bayes, knn, tree, forest, svm_smo };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::naive_bayes, Algorithm::knn, Algorithm::tree,
                                               Algorithm::forest, Algorithm::svm_smo};

inline std::string_view name(Algorithm a) {
  switch (a) {
    case Algorithm::naive_bayes: return "naive_bayes";
    case Algorithm::knn: return "knn";
    case Algorithm::tree: return "tree";
    case Algorithm::forest: return "forest";
    case Algorithm::svm_smo: return "svm_smo";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  for (auto a : kAllAlgorithms)
    if (name(a) == s) return a;
  throw InvalidArgument("unknown algorithm '" + std::string(s) + "'");
}

/// Hyperparameters for all learners. Defaults are the conventional ones for
/// each method.
struct LearnerConfig {
  std::size_t knn_k = 1;
  std::size_t tree_min_leaf = 2;
  std::size_t forest_trees = 100;
  std::size_t forest_min_leaf = 1;
  /// Features tried per forest split; 0 selects floor(sqrt(columns)).
  std::size_t forest_features = 0;
  double svm_C = 1.0;
  double svm_tol = 1e-3;
  std::size_t svm_max_passes = 10;
  double nb_variance_floor = 1e-9;
  double nb_alpha = 1.0;  // Laplace smoothing of the multinomial model
  unsigned threads = 1;
};

/// Rows of a feature matrix with integer class labels in [0, n_classes).
struct TrainingView {
  std::span<const double> data;  // row-major
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const std::size_t> labels;
  std::size_t n_classes = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

/// Index of the largest score; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

}  // namespace mtsim::learn
