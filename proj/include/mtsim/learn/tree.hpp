#pragma once

// Binary decision trees on numeric features and bagged random forests built
// from them. Single trees choose splits by gain ratio (C4.5 style: only
// attributes with at least average information gain compete); forest trees
// use plain information gain over a random feature subset per split.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "../parallel.hpp"
#include "../rng.hpp"
#include "common.hpp"

namespace mtsim::learn {

enum class SplitCriterion { gain_ratio, info_gain };

struct TreeParams {
  std::size_t min_leaf = 2;
  SplitCriterion criterion = SplitCriterion::gain_ratio;
  std::size_t features_per_split = 0;  // 0 = all features
};

struct TreeNode {
  std::int64_t feature = -1;  // -1 for leaves
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<double> distribution;  // class fractions at this node

  bool is_leaf() const { return feature < 0; }
};

namespace tree_detail {

inline double entropy(std::span<const std::size_t> counts, std::size_t n) {
  if (n == 0) return 0.0;
  double h = 0;
  const double dn = static_cast<double>(n);
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / dn;
    h -= p * std::log2(p);
  }
  return h;
}

struct Candidate {
  bool valid = false;
  double gain = 0.0;
  double split_info = 0.0;
  double threshold = 0.0;
};

// Best threshold of one feature by information gain; first best wins.
inline Candidate best_threshold(const TrainingView& d, std::span<const std::size_t> idx, std::size_t feature,
                                std::size_t min_leaf, double parent_entropy,
                                std::vector<std::pair<double, std::size_t>>& scratch) {
  const std::size_t n = idx.size();
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = {d.data[idx[i] * d.cols + feature], d.labels[idx[i]]};
  std::sort(scratch.begin(), scratch.end());
  Candidate best;
  if (scratch.front().first == scratch.back().first) return best;

  std::vector<std::size_t> left(d.n_classes, 0), right(d.n_classes, 0);
  for (const auto& [v, y] : scratch) ++right[y];
  const double dn = static_cast<double>(n);
  for (std::size_t p = 1; p < n; ++p) {
    const auto y = scratch[p - 1].second;
    ++left[y];
    --right[y];
    if (p < min_leaf || n - p < min_leaf) continue;
    const double a = scratch[p - 1].first, b = scratch[p].first;
    if (!(a < b)) continue;
    const double wl = static_cast<double>(p) / dn, wr = 1.0 - wl;
    const double gain = parent_entropy - wl * entropy(left, p) - wr * entropy(right, n - p);
    if (!best.valid || gain > best.gain) {
      best.valid = true;
      best.gain = gain;
      best.split_info = -(wl * std::log2(wl) + wr * std::log2(wr));
      double mid = a + (b - a) / 2.0;
      if (!(mid < b)) mid = a;
      best.threshold = mid;
    }
  }
  return best;
}

}  // namespace tree_detail

class DecisionTree {
 public:
  DecisionTree() = default;

  /// Grows a tree on the rows listed in `sample` (duplicates allowed, as in
  /// bootstrap samples). `rng` is only used when features_per_split > 0.
  static DecisionTree grow(const TrainingView& d, std::vector<std::size_t> sample, const TreeParams& params,
                           Rng* rng = nullptr) {
    if (sample.empty()) throw InvalidArgument("cannot grow a tree on an empty sample");
    DecisionTree t;
    t.n_classes_ = d.n_classes;
    const std::size_t min_leaf = std::max<std::size_t>(params.min_leaf, 1);

    struct Work {
      std::uint32_t node;
      std::vector<std::size_t> idx;
    };
    std::vector<Work> stack;
    t.nodes_.push_back({});
    stack.push_back({0, std::move(sample)});
    std::vector<std::pair<double, std::size_t>> scratch;
    std::vector<std::size_t> feature_order(d.cols);

    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      std::vector<std::size_t> counts(d.n_classes, 0);
      for (auto i : w.idx) ++counts[d.labels[i]];
      const std::size_t n = w.idx.size();
      {
        auto& node = t.nodes_[w.node];
        node.distribution.resize(d.n_classes);
        for (std::size_t c = 0; c < d.n_classes; ++c)
          node.distribution[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
      }
      const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
      if (pure || n < 2 * min_leaf) continue;

      const double h = tree_detail::entropy(counts, n);
      std::vector<std::pair<std::size_t, tree_detail::Candidate>> cands;
      auto evaluate = [&](std::size_t f) {
        auto c = tree_detail::best_threshold(d, w.idx, f, min_leaf, h, scratch);
        if (c.valid) cands.emplace_back(f, c);
      };
      if (params.features_per_split == 0 || params.features_per_split >= d.cols) {
        for (std::size_t f = 0; f < d.cols; ++f) evaluate(f);
      } else {
        std::iota(feature_order.begin(), feature_order.end(), 0);
        const std::size_t m = params.features_per_split;
        for (std::size_t i = 0; i < m; ++i)
          std::swap(feature_order[i], feature_order[i + uniform_index(*rng, d.cols - i)]);
        std::sort(feature_order.begin(), feature_order.begin() + static_cast<std::ptrdiff_t>(m));
        for (std::size_t i = 0; i < m; ++i) evaluate(feature_order[i]);
        // No usable feature in the subset: fall back to the remaining ones.
        if (cands.empty()) {
          std::sort(feature_order.begin() + static_cast<std::ptrdiff_t>(m), feature_order.end());
          for (std::size_t i = m; i < d.cols; ++i) evaluate(feature_order[i]);
        }
      }
      if (cands.empty()) continue;
      std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

      std::size_t chosen = 0;
      if (params.criterion == SplitCriterion::info_gain) {
        for (std::size_t i = 1; i < cands.size(); ++i)
          if (cands[i].second.gain > cands[chosen].second.gain) chosen = i;
      } else {
        double avg = 0;
        for (const auto& [f, c] : cands) avg += c.gain;
        avg /= static_cast<double>(cands.size());
        double best_ratio = -1;
        for (std::size_t i = 0; i < cands.size(); ++i) {
          const auto& c = cands[i].second;
          if (c.gain < avg - 1e-12) continue;
          const double ratio = c.split_info > 0 ? c.gain / c.split_info : 0.0;
          if (ratio > best_ratio) {
            best_ratio = ratio;
            chosen = i;
          }
        }
      }
      const auto feature = cands[chosen].first;
      const double thr = cands[chosen].second.threshold;
      std::vector<std::size_t> li, ri;
      for (auto i : w.idx) (d.data[i * d.cols + feature] <= thr ? li : ri).push_back(i);

      const auto left_id = static_cast<std::uint32_t>(t.nodes_.size());
      t.nodes_.push_back({});
      t.nodes_.push_back({});
      auto& node = t.nodes_[w.node];
      node.feature = static_cast<std::int64_t>(feature);
      node.threshold = thr;
      node.left = left_id;
      node.right = left_id + 1;
      stack.push_back({left_id + 1, std::move(ri)});
      stack.push_back({left_id, std::move(li)});
    }
    return t;
  }

  const TreeNode& leaf(std::span<const double> x) const {
    const TreeNode* n = &nodes_.at(0);
    while (!n->is_leaf()) n = &nodes_[x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right];
    return *n;
  }

  /// Class distribution of the leaf reached by x.
  const std::vector<double>& predict(std::span<const double> x) const { return leaf(x).distribution; }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> st{{0, 0}};
    while (!st.empty()) {
      auto [i, dep] = st.back();
      st.pop_back();
      best = std::max(best, dep);
      if (!nodes_[i].is_leaf()) {
        st.push_back({nodes_[i].left, dep + 1});
        st.push_back({nodes_[i].right, dep + 1});
      }
    }
    return best;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t n_classes() const { return n_classes_; }

  static DecisionTree from_nodes(std::vector<TreeNode> nodes, std::size_t n_classes) {
    DecisionTree t;
    t.nodes_ = std::move(nodes);
    t.n_classes_ = n_classes;
    for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
      const auto& n = t.nodes_[i];
      if (n.distribution.size() != n_classes) throw InvalidArgument("tree node distribution has wrong size");
      if (!n.is_leaf() && (n.left >= t.nodes_.size() || n.right >= t.nodes_.size() || n.left <= i || n.right <= i))
        throw InvalidArgument("tree node child index out of range");
    }
    return t;
  }

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_classes_ = 0;
};

struct TreeModel {
  DecisionTree tree;

  static TreeModel fit(const TrainingView& d, const LearnerConfig& cfg) {
    std::vector<std::size_t> all(d.rows);
    std::iota(all.begin(), all.end(), 0);
    TreeParams p;
    p.min_leaf = cfg.tree_min_leaf;
    return {DecisionTree::grow(d, std::move(all), p)};
  }

  std::vector<double> predict(std::span<const double> x) const { return tree.predict(x); }
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::size_t n_classes = 0;

  /// Tree t is grown from generator make_rng(seed + t), so the forest does
  /// not depend on how trees are scheduled across threads.
  static ForestModel fit(const TrainingView& d, const LearnerConfig& cfg, std::uint64_t seed) {
    if (cfg.forest_trees == 0) throw InvalidArgument("forest_trees must be >= 1");
    ForestModel m;
    m.n_classes = d.n_classes;
    m.trees.resize(cfg.forest_trees);
    TreeParams p;
    p.min_leaf = cfg.forest_min_leaf;
    p.criterion = SplitCriterion::info_gain;
    p.features_per_split = cfg.forest_features != 0
                               ? cfg.forest_features
                               : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d.cols))));
    parallel_for(cfg.forest_trees, cfg.threads, [&](std::size_t t) {
      Rng rng = make_rng(seed + t);
      std::vector<std::size_t> sample(d.rows);
      for (auto& s : sample) s = uniform_index(rng, d.rows);
      m.trees[t] = DecisionTree::grow(d, std::move(sample), p, &rng);
    });
    return m;
  }

  /// Fraction of trees whose leaf majority is each class.
  std::vector<double> predict(std::span<const double> x) const {
    std::vector<std::size_t> votes(n_classes, 0);
    for (const auto& t : trees) ++votes[argmax(t.predict(x))];
    std::vector<double> out(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
      out[c] = static_cast<double>(votes[c]) / static_cast<double>(trees.size());
    return out;
  }
};

}  // namespace mtsim::learn
