#pragma once

// Stratified k-fold cross-validation over feature-set / learner grids and
// precision / recall / F1 reporting.

#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "features.hpp"
#include "learn/model.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace mtsim::eval {

/// Partitions indices into k folds. Within each class (in label order) the
/// indices are shuffled with the seeded generator and dealt round-robin; the
/// dealing position carries over from one class to the next so fold sizes
/// stay balanced too.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::string> y, std::size_t k,
                                                              std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("need at least 2 folds");
  if (k > y.size())
    throw InvalidArgument("fold count " + std::to_string(k) + " exceeds dataset size " + std::to_string(y.size()));
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  Rng rng = make_rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (auto& [label, idx] : by_class) {
    shuffle(idx, rng);
    for (auto i : idx) {
      folds[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

using Confusion = std::vector<std::vector<std::size_t>>;  // [actual][predicted]

struct Metrics {
  std::vector<ClassMetrics> per_class;  // same order as classes
  double weighted_f1 = 0;
};

/// Per-class precision, recall, F1 (0/0 taken as 0) and support-weighted F1.
inline Metrics compute_metrics(const Confusion& confusion, std::span<const std::string> classes) {
  const std::size_t k = classes.size();
  if (confusion.size() != k) throw InvalidArgument("confusion matrix does not match class list");
  for (const auto& r : confusion)
    if (r.size() != k) throw InvalidArgument("confusion matrix is not square");
  Metrics m;
  m.per_class.resize(k);
  std::size_t total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += confusion[c][j];
      col += confusion[j][c];
    }
    const double tp = static_cast<double>(confusion[c][c]);
    auto& pc = m.per_class[c];
    pc.support = row;
    pc.precision = col == 0 ? 0.0 : tp / static_cast<double>(col);
    pc.recall = row == 0 ? 0.0 : tp / static_cast<double>(row);
    pc.f1 = pc.precision + pc.recall == 0 ? 0.0 : 2 * pc.precision * pc.recall / (pc.precision + pc.recall);
    total += row;
  }
  if (total > 0)
    for (const auto& pc : m.per_class)
      m.weighted_f1 += static_cast<double>(pc.support) / static_cast<double>(total) * pc.f1;
  return m;
}

struct CvConfig {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  learn::LearnerConfig learner;
  features::PipelineConfig pipeline;
  unsigned threads = 1;  // folds evaluated in parallel
};

struct EvaluationReport {
  std::vector<std::string> classes;
  std::vector<ClassMetrics> per_class;
  double weighted_f1 = 0;
  Confusion confusion;
  std::string config_echo;
  std::vector<double> fold_scores;  // weighted F1 of each fold on its own
  features::FeatureSets sets;
  learn::Algorithm algorithm = learn::Algorithm::svm_smo;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& r : confusion)
      for (auto v : r) n += v;
    return n;
  }
};

inline std::string describe(features::FeatureSets sets, learn::Algorithm algo, const CvConfig& cfg) {
  return "sets=" + sets.label() + " algorithm=" + std::string(learn::name(algo)) +
         " folds=" + std::to_string(cfg.folds) + " seed=" + std::to_string(cfg.seed);
}

/// k-fold stratified cross-validation. Every fit-dependent feature model is
/// fitted on the training split of its fold only; predictions of all folds
/// are pooled into one confusion matrix. Fold f trains its learner with
/// seed + f.
inline EvaluationReport cross_validate(const Corpus& corpus, features::FeatureSets sets, learn::Algorithm algorithm,
                                       const CvConfig& cfg) {
  const auto y = corpus.labels();
  if (corpus.size() < cfg.folds)
    throw InvalidArgument("corpus has fewer tasks than folds");
  const auto folds = stratified_folds(y, cfg.folds, cfg.seed);
  const auto classes = corpus.categories();
  const std::size_t k = classes.size();
  auto class_index = [&](const std::string& label) {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
  };

  std::vector<Confusion> fold_conf(cfg.folds, Confusion(k, std::vector<std::size_t>(k, 0)));
  auto learner = cfg.learner;
  if (cfg.threads > 1) learner.threads = 1;
  auto pipeline_cfg = cfg.pipeline;
  pipeline_cfg.sets = sets;

  parallel_for(cfg.folds, cfg.threads, [&](std::size_t f) {
    try {
      std::vector<char> held_out(corpus.size(), 0);
      for (auto i : folds[f]) held_out[i] = 1;
      std::vector<MicroTask> train_tasks, test_tasks;
      std::vector<std::string> train_y;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (held_out[i]) {
          test_tasks.push_back(corpus.tasks[i]);
        } else {
          train_tasks.push_back(corpus.tasks[i]);
          train_y.push_back(y[i]);
        }
      }
      const auto pipeline = features::FeaturePipeline::fit(train_tasks, pipeline_cfg);
      const auto X_train = pipeline.transform(train_tasks);
      const auto model = learn::train(algorithm, X_train, train_y, learner, cfg.seed + f);
      const auto X_test = pipeline.transform(test_tasks);
      for (std::size_t r = 0; r < test_tasks.size(); ++r) {
        const auto p = model.predict(X_test.row(r));
        ++fold_conf[f][class_index(test_tasks[r].category)][class_index(p.label)];
      }
    } catch (const std::exception& e) {
      throw Error("fold " + std::to_string(f) + ": " + e.what());
    }
  });

  EvaluationReport rep;
  rep.classes = classes;
  rep.sets = sets;
  rep.algorithm = algorithm;
  rep.config_echo = describe(sets, algorithm, cfg);
  rep.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (const auto& fc : fold_conf) {
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t p = 0; p < k; ++p) rep.confusion[a][p] += fc[a][p];
    rep.fold_scores.push_back(compute_metrics(fc, classes).weighted_f1);
  }
  const auto m = compute_metrics(rep.confusion, classes);
  rep.per_class = m.per_class;
  rep.weighted_f1 = m.weighted_f1;
  return rep;
}

struct GridResult {
  std::vector<features::FeatureSets> sets;     // rows
  std::vector<learn::Algorithm> algorithms;    // columns
  std::vector<EvaluationReport> cells;         // row-major

  const EvaluationReport& cell(std::size_t row, std::size_t col) const { return cells.at(row * algorithms.size() + col); }
};

/// One cross-validation per (feature sets, algorithm) cell. All cells share
/// the same folds, so each equals a standalone cross_validate call.
inline GridResult grid_run(const Corpus& corpus, std::span<const features::FeatureSets> sets,
                           std::span<const learn::Algorithm> algorithms, const CvConfig& cfg) {
  GridResult g;
  g.sets.assign(sets.begin(), sets.end());
  g.algorithms.assign(algorithms.begin(), algorithms.end());
  const std::size_t n = sets.size() * algorithms.size();
  g.cells.resize(n);
  auto cell_cfg = cfg;
  if (cfg.threads > 1) {
    cell_cfg.threads = 1;
    cell_cfg.learner.threads = 1;
  }
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    g.cells[i] = cross_validate(corpus, sets[i / algorithms.size()], algorithms[i % algorithms.size()], cell_cfg);
  });
  return g;
}

// ------------------------------------------------------------------ output

inline std::vector<std::string> csv_columns(std::span<const std::string> classes) {
  std::vector<std::string> cols = {"feature_sets", "algorithm", "weighted_f1", "mean_fold_f1"};
  for (const auto& c : classes)
    for (const char* m : {"precision", "recall", "f1", "support"}) cols.push_back(std::string(m) + "[" + c + "]");
  return cols;
}

inline std::vector<std::string> csv_fields(const EvaluationReport& r) {
  const double mean_fold = r.fold_scores.empty()
                               ? 0.0
                               : std::accumulate(r.fold_scores.begin(), r.fold_scores.end(), 0.0) /
                                     static_cast<double>(r.fold_scores.size());
  std::vector<std::string> f = {r.sets.label(), std::string(learn::name(r.algorithm)), report::fixed(r.weighted_f1, 6),
                                report::fixed(mean_fold, 6)};
  for (const auto& pc : r.per_class) {
    f.push_back(report::fixed(pc.precision, 6));
    f.push_back(report::fixed(pc.recall, 6));
    f.push_back(report::fixed(pc.f1, 6));
    f.push_back(std::to_string(pc.support));
  }
  return f;
}

/// CSV body: header row plus one row per cell.
inline std::string to_csv(const GridResult& g) {
  std::string out;
  if (g.cells.empty()) return out;
  out += report::csv_row(csv_columns(g.cells.front().classes)) + "\n";
  for (const auto& c : g.cells) out += report::csv_row(csv_fields(c)) + "\n";
  return out;
}

/// Weighted-F1 grid with feature sets as rows and algorithms as columns.
inline std::string to_text(const GridResult& g) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"Feature Set"};
  for (auto a : g.algorithms) head.emplace_back(learn::name(a));
  rows.push_back(head);
  for (std::size_t r = 0; r < g.sets.size(); ++r) {
    std::vector<std::string> row = {g.sets[r].label()};
    for (std::size_t c = 0; c < g.algorithms.size(); ++c) row.push_back(report::fixed(g.cell(r, c).weighted_f1, 2));
    rows.push_back(row);
  }
  return report::aligned_table(rows);
}

/// Per-class table and confusion matrix of a single evaluation.
inline std::string to_text(const EvaluationReport& r) {
  std::vector<std::vector<std::string>> rows = {{"Class", "Precision", "Recall", "F1", "Support"}};
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& pc = r.per_class[c];
    rows.push_back({r.classes[c], report::fixed(pc.precision, 3), report::fixed(pc.recall, 3), report::fixed(pc.f1, 3),
                    std::to_string(pc.support)});
  }
  rows.push_back({"weighted", "", "", report::fixed(r.weighted_f1, 3), std::to_string(r.total())});
  std::string out = report::aligned_table(rows);
  out += "\nconfusion (rows = actual, columns = predicted)\n";
  std::vector<std::vector<std::string>> cm;
  std::vector<std::string> head = {""};
  for (std::size_t c = 0; c < r.classes.size(); ++c) head.push_back("P" + std::to_string(c + 1));
  cm.push_back(head);
  for (std::size_t a = 0; a < r.classes.size(); ++a) {
    std::vector<std::string> row = {"P" + std::to_string(a + 1) + " " + r.classes[a]};
    for (auto v : r.confusion[a]) row.push_back(std::to_string(v));
    cm.push_back(row);
  }
  out += report::aligned_table(cm);
  return out;
}

}  // namespace mtsim::eval
