#pragma once

// Linear support vector machines trained with Platt's sequential minimal
// optimization, one binary machine per class (one-vs-rest). Features are
// standardized with training-set mean and standard deviation.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "../parallel.hpp"
#include "../rng.hpp"
#include "common.hpp"

namespace mtsim::learn {

/// Dual solution of one binary problem (targets +1 / -1).
struct SmoSolution {
  std::vector<double> alpha;
  double b = 0.0;  // decision u(x) = sum_j alpha_j y_j K(x_j, x) - b
  bool converged = false;
  std::size_t full_passes = 0;
};

/// Platt's SMO over a precomputed n x n kernel matrix (row-major).
class SmoSolver {
 public:
  SmoSolver(std::span<const double> kernel, std::span<const double> targets, double C, double tol, Rng& rng)
      : K_(kernel), y_(targets), n_(targets.size()), C_(C), tol_(tol), rng_(rng),
        alpha_(n_, 0.0), error_(n_) {
    // All multipliers start at 0, so u = -b = 0 and E_i = -y_i.
    for (std::size_t i = 0; i < n_; ++i) error_[i] = -y_[i];
  }

  SmoSolution solve(std::size_t max_full_passes) {
    SmoSolution sol;
    bool examine_all = true;
    std::size_t changed = 0;
    // Bound on non-bound sweeps guards against cycling on degenerate data.
    std::size_t sweeps = 0;
    const std::size_t max_sweeps = std::max<std::size_t>(1000, 50 * n_);
    while ((changed > 0 || examine_all) && sweeps < max_sweeps) {
      if (examine_all) {
        if (sol.full_passes == max_full_passes) break;
        ++sol.full_passes;
      }
      ++sweeps;
      changed = 0;
      const std::size_t start = uniform_index(rng_, n_);
      for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t i = (start + k) % n_;
        if (examine_all || non_bound(i)) changed += examine(i);
      }
      if (examine_all) {
        examine_all = false;
        if (changed == 0) {
          sol.converged = true;
          break;
        }
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    sol.alpha = alpha_;
    sol.b = b_;
    return sol;
  }

 private:
  std::span<const double> K_;
  std::span<const double> y_;
  std::size_t n_;
  double C_, tol_;
  Rng& rng_;
  std::vector<double> alpha_;
  std::vector<double> error_;  // u_i - y_i, kept exact for every example
  double b_ = 0.0;
  static constexpr double kEps = 1e-12;

  double k(std::size_t i, std::size_t j) const { return K_[i * n_ + j]; }
  bool non_bound(std::size_t i) const { return alpha_[i] > 0 && alpha_[i] < C_; }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1_old = alpha_[i1], a2_old = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = error_[i1], e2 = error_[i2];
    const double s = y1 * y2;
    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(C_, C_ + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a2_old + a1_old - C_);
      hi = std::min(C_, a2_old + a1_old);
    }
    if (lo >= hi) return false;
    const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
    const double eta = k11 + k22 - 2 * k12;
    double a2;
    if (eta > 0) {
      a2 = std::clamp(a2_old + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective at the segment ends.
      const double f1 = y1 * (e1 + b_) - a1_old * k11 - s * a2_old * k12;
      const double f2 = y2 * (e2 + b_) - s * a1_old * k12 - a2_old * k22;
      const double l1 = a1_old + s * (a2_old - lo), h1 = a1_old + s * (a2_old - hi);
      const double lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (lobj < hobj - kEps) a2 = lo;
      else if (lobj > hobj + kEps) a2 = hi;
      else a2 = a2_old;
    }
    if (std::abs(a2 - a2_old) < kEps * (a2 + a2_old + kEps)) return false;
    double a1 = a1_old + s * (a2_old - a2);
    if (a1 < 0) a1 = 0;
    if (a1 > C_) a1 = C_;

    const double d1 = y1 * (a1 - a1_old), d2 = y2 * (a2 - a2_old);
    const double b1 = e1 + d1 * k11 + d2 * k12 + b_;
    const double b2 = e2 + d1 * k12 + d2 * k22 + b_;
    double b_new;
    if (a1 > 0 && a1 < C_) b_new = b1;
    else if (a2 > 0 && a2 < C_) b_new = b2;
    else b_new = 0.5 * (b1 + b2);

    const double db = b_new - b_;
    for (std::size_t i = 0; i < n_; ++i) error_[i] += d1 * k(i1, i) + d2 * k(i2, i) - db;
    alpha_[i1] = a1;
    alpha_[i2] = a2;
    b_ = b_new;
    return true;
  }

  std::size_t examine(std::size_t i2) {
    const double r2 = error_[i2] * y_[i2];
    const double a2 = alpha_[i2];
    if (!((r2 < -tol_ && a2 < C_) || (r2 > tol_ && a2 > 0))) return 0;

    // Second-choice heuristic: maximize |E1 - E2| over non-bound examples.
    std::size_t best = n_;
    double best_gap = -1;
    std::size_t n_non_bound = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!non_bound(i)) continue;
      ++n_non_bound;
      const double gap = std::abs(error_[i] - error_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (n_non_bound > 1 && best != n_ && take_step(best, i2)) return 1;

    const std::size_t start1 = uniform_index(rng_, n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start1 + k) % n_;
      if (non_bound(i1) && take_step(i1, i2)) return 1;
    }
    const std::size_t start2 = uniform_index(rng_, n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start2 + k) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }
};

/// Number of multipliers violating the KKT conditions by more than tol.
/// Used by tests; `kernel` and `targets` as for SmoSolver.
inline std::size_t kkt_violations(std::span<const double> kernel, std::span<const double> targets,
                                  const SmoSolution& sol, double C, double tol) {
  const std::size_t n = targets.size();
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double u = -sol.b;
    for (std::size_t j = 0; j < n; ++j) u += sol.alpha[j] * targets[j] * kernel[j * n + i];
    const double margin = targets[i] * u;
    const double a = sol.alpha[i];
    const bool ok = (a <= 0 && margin >= 1 - tol) || (a >= C && margin <= 1 + tol) ||
                    (a > 0 && a < C && std::abs(margin - 1) <= tol);
    bad += !ok;
  }
  return bad;
}

struct SvmModel {
  std::vector<double> mean, scale;  // standardization; scale = 1/std or 0 for constant
  std::vector<double> weights;      // class-major [c * cols + f] in standardized space
  std::vector<double> bias;         // decision = w . z - b
  std::vector<bool> converged;
  std::size_t cols = 0;

  static constexpr double kStdFloor = 1e-9;

  static SvmModel fit(const TrainingView& d, const LearnerConfig& cfg, std::uint64_t seed) {
    if (!(cfg.svm_C > 0) || !(cfg.svm_tol > 0)) throw InvalidArgument("svm_C and svm_tol must be positive");
    SvmModel m;
    m.cols = d.cols;
    const std::size_t n = d.rows;
    m.mean.assign(d.cols, 0.0);
    m.scale.assign(d.cols, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d.cols; ++f) m.mean[f] += d.data[i * d.cols + f];
    for (auto& v : m.mean) v /= static_cast<double>(n);
    for (std::size_t f = 0; f < d.cols; ++f) {
      double ss = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dev = d.data[i * d.cols + f] - m.mean[f];
        ss += dev * dev;
      }
      const double sd = std::sqrt(ss / static_cast<double>(n));
      m.scale[f] = sd > kStdFloor ? 1.0 / sd : 0.0;
    }
    // Standardized rows and their Gram matrix, shared by all machines.
    std::vector<double> z(n * d.cols);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d.cols; ++f)
        z[i * d.cols + f] = (d.data[i * d.cols + f] - m.mean[f]) * m.scale[f];
    std::vector<double> gram(n * n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0;
        for (std::size_t f = 0; f < d.cols; ++f) s += z[i * d.cols + f] * z[j * d.cols + f];
        gram[i * n + j] = s;
      }
    });
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) gram[i * n + j] = gram[j * n + i];

    const std::size_t k = d.n_classes;
    m.weights.assign(k * d.cols, 0.0);
    m.bias.assign(k, 0.0);
    std::vector<char> conv(k, 0);
    parallel_for(k, cfg.threads, [&](std::size_t c) {
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = d.labels[i] == c ? 1.0 : -1.0;
      Rng rng = make_rng(seed + c);
      SmoSolver solver(gram, y, cfg.svm_C, cfg.svm_tol, rng);
      const auto sol = solver.solve(cfg.svm_max_passes);
      for (std::size_t i = 0; i < n; ++i) {
        if (sol.alpha[i] == 0) continue;
        const double coef = sol.alpha[i] * y[i];
        for (std::size_t f = 0; f < d.cols; ++f) m.weights[c * d.cols + f] += coef * z[i * d.cols + f];
      }
      m.bias[c] = sol.b;
      conv[c] = sol.converged;
    });
    m.converged.assign(conv.begin(), conv.end());
    return m;
  }

  /// Per-class decision values.
  std::vector<double> predict(std::span<const double> x) const {
    const std::size_t k = bias.size();
    std::vector<double> out(k);
    for (std::size_t c = 0; c < k; ++c) {
      double s = -bias[c];
      for (std::size_t f = 0; f < cols; ++f) {
        if (scale[f] == 0) continue;
        s += weights[c * cols + f] * (x[f] - mean[f]) * scale[f];
      }
      out[c] = s;
    }
    return out;
  }
};

}  // namespace mtsim::learn
