#pragma once

// Naive Bayes with two event models: multinomial for non-negative term
// weights, Gaussian (per class and feature) otherwise.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "common.hpp"

namespace mtsim::learn {

struct NaiveBayesModel {
  bool multinomial = false;
  std::vector<double> log_prior;  // per class
  // Gaussian: mean and variance, class-major [c * cols + f].
  std::vector<double> mean;
  std::vector<double> var;
  // Multinomial: log feature probabilities, class-major.
  std::vector<double> log_theta;
  std::size_t cols = 0;

  static NaiveBayesModel fit(const TrainingView& d, bool multinomial, const LearnerConfig& cfg) {
    NaiveBayesModel m;
    m.multinomial = multinomial;
    m.cols = d.cols;
    const std::size_t k = d.n_classes;
    std::vector<double> count(k, 0.0);
    for (auto y : d.labels) count[y] += 1.0;
    for (std::size_t c = 0; c < k; ++c)
      m.log_prior.push_back(std::log(count[c] / static_cast<double>(d.rows)));

    if (multinomial) {
      std::vector<double> sums(k * d.cols, 0.0);
      for (std::size_t i = 0; i < d.rows; ++i) {
        const auto x = d.row(i);
        for (std::size_t f = 0; f < d.cols; ++f) {
          if (x[f] < 0) throw InvalidArgument("multinomial naive Bayes needs non-negative features");
          sums[d.labels[i] * d.cols + f] += x[f];
        }
      }
      m.log_theta.resize(k * d.cols);
      for (std::size_t c = 0; c < k; ++c) {
        double total = 0;
        for (std::size_t f = 0; f < d.cols; ++f) total += sums[c * d.cols + f];
        const double denom = total + cfg.nb_alpha * static_cast<double>(d.cols);
        for (std::size_t f = 0; f < d.cols; ++f)
          m.log_theta[c * d.cols + f] = std::log((sums[c * d.cols + f] + cfg.nb_alpha) / denom);
      }
      return m;
    }

    m.mean.assign(k * d.cols, 0.0);
    m.var.assign(k * d.cols, 0.0);
    for (std::size_t i = 0; i < d.rows; ++i) {
      const auto x = d.row(i);
      for (std::size_t f = 0; f < d.cols; ++f) m.mean[d.labels[i] * d.cols + f] += x[f];
    }
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t f = 0; f < d.cols; ++f) m.mean[c * d.cols + f] /= count[c];
    for (std::size_t i = 0; i < d.rows; ++i) {
      const auto x = d.row(i);
      for (std::size_t f = 0; f < d.cols; ++f) {
        const double dev = x[f] - m.mean[d.labels[i] * d.cols + f];
        m.var[d.labels[i] * d.cols + f] += dev * dev;
      }
    }
    // Maximum-likelihood variance, floored.
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t f = 0; f < d.cols; ++f) {
        double& v = m.var[c * d.cols + f];
        v = std::max(v / count[c], cfg.nb_variance_floor);
      }
    return m;
  }

  /// Posterior class probabilities.
  std::vector<double> predict(std::span<const double> x) const {
    const std::size_t k = log_prior.size();
    std::vector<double> logp(log_prior);
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0;
      if (multinomial) {
        for (std::size_t f = 0; f < cols; ++f)
          if (x[f] != 0) s += x[f] * log_theta[c * cols + f];
      } else {
        for (std::size_t f = 0; f < cols; ++f) {
          const double v = var[c * cols + f];
          const double dev = x[f] - mean[c * cols + f];
          s += -0.5 * std::log(2.0 * std::numbers::pi * v) - dev * dev / (2.0 * v);
        }
      }
      logp[c] += s;
    }
    const double mx = *std::max_element(logp.begin(), logp.end());
    double z = 0;
    for (auto& l : logp) {
      l = std::exp(l - mx);
      z += l;
    }
    for (auto& l : logp) l /= z;
    return logp;
  }
};

}  // namespace mtsim::learn
