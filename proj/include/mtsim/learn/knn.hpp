#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "common.hpp"

namespace mtsim::learn {

/// k-nearest neighbours under Euclidean distance. Equal distances are
/// resolved by training row order.
struct KnnModel {
  std::size_t k = 1;
  std::size_t cols = 0;
  std::size_t n_classes = 0;
  std::vector<double> rows;  // row-major training data
  std::vector<std::size_t> labels;

  static KnnModel fit(const TrainingView& d, const LearnerConfig& cfg) {
    if (cfg.knn_k == 0) throw InvalidArgument("knn_k must be >= 1");
    KnnModel m;
    m.k = cfg.knn_k;
    m.cols = d.cols;
    m.n_classes = d.n_classes;
    m.rows.assign(d.data.begin(), d.data.end());
    m.labels.assign(d.labels.begin(), d.labels.end());
    return m;
  }

  std::size_t size() const { return labels.size(); }

  /// Indices of the k nearest training rows, nearest first.
  std::vector<std::size_t> neighbours(std::span<const double> x) const {
    std::vector<std::pair<double, std::size_t>> dist(size());
    for (std::size_t i = 0; i < size(); ++i) {
      double s = 0;
      const double* r = rows.data() + i * cols;
      for (std::size_t f = 0; f < cols; ++f) {
        const double diff = r[f] - x[f];
        s += diff * diff;
      }
      dist[i] = {s, i};
    }
    const std::size_t kk = std::min(k, size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    std::vector<std::size_t> out(kk);
    for (std::size_t i = 0; i < kk; ++i) out[i] = dist[i].second;
    return out;
  }

  /// Fraction of the k neighbours voting for each class.
  std::vector<double> predict(std::span<const double> x) const {
    std::vector<double> votes(n_classes, 0.0);
    const auto nn = neighbours(x);
    for (auto i : nn) votes[labels[i]] += 1.0;
    for (auto& v : votes) v /= static_cast<double>(nn.size());
    return votes;
  }
};

}  // namespace mtsim::learn
