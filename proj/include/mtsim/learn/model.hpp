#pragma once

// Uniform train / predict / persist surface over the five learners.

#include <cmath>
#include <fstream>
#include <map>
#include <span>
#include <variant>

#include <json.hpp>

#include "../features.hpp"
#include "knn.hpp"
#include "naive_bayes.hpp"
#include "svm_smo.hpp"
#include "tree.hpp"

namespace mtsim::learn {

struct Prediction {
  std::size_t class_index = 0;
  std::string label;
  std::vector<double> scores;  // one per class, in TrainedModel::classes() order
};

class TrainedModel {
 public:
  using Params = std::variant<NaiveBayesModel, KnnModel, TreeModel, ForestModel, SvmModel>;

  TrainedModel(Algorithm algorithm, std::vector<std::string> classes, std::size_t n_features,
               features::FeatureSets provenance, std::uint64_t seed, Params params)
      : algorithm_(algorithm), classes_(std::move(classes)), n_features_(n_features),
        provenance_(provenance), seed_(seed), params_(std::move(params)) {}

  Algorithm algorithm() const { return algorithm_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t n_features() const { return n_features_; }
  features::FeatureSets provenance() const { return provenance_; }
  std::uint64_t seed() const { return seed_; }
  const Params& params() const { return params_; }

  /// Scores: NB posteriors, kNN / forest vote fractions, tree leaf
  /// distribution, SVM decision values. Label = argmax, ties to the first
  /// class.
  Prediction predict(std::span<const double> x) const {
    if (x.size() != n_features_)
      throw InvalidArgument("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                            std::to_string(n_features_));
    Prediction p;
    p.scores = std::visit([&](const auto& m) { return std::vector<double>(m.predict(x)); }, params_);
    p.class_index = argmax(p.scores);
    p.label = classes_[p.class_index];
    return p;
  }

 private:
  Algorithm algorithm_;
  std::vector<std::string> classes_;
  std::size_t n_features_;
  features::FeatureSets provenance_;
  std::uint64_t seed_;
  Params params_;
};

/// Fits one learner. Naive Bayes uses the multinomial event model when the
/// matrix comes only from the content set (and is non-negative), the
/// Gaussian one otherwise.
inline TrainedModel train(Algorithm algorithm, const features::FeatureMatrix& X, std::span<const std::string> y,
                          const LearnerConfig& config = {}, std::uint64_t seed = 0) {
  if (y.size() != X.rows())
    throw InvalidArgument("label count " + std::to_string(y.size()) + " does not match row count " +
                          std::to_string(X.rows()));
  std::vector<std::string> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw InvalidArgument("training data must contain at least two classes");

  std::vector<std::size_t> labels(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    labels[i] = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
  for (double v : X.data())
    if (!std::isfinite(v)) throw InvalidArgument("training matrix contains non-finite values");

  TrainingView view{X.data(), X.rows(), X.cols(), labels, classes.size()};
  auto params = [&]() -> TrainedModel::Params {
    switch (algorithm) {
      case Algorithm::naive_bayes: {
        bool multinomial = X.provenance().only(features::FeatureSet::content);
        if (multinomial)
          multinomial = std::all_of(X.data().begin(), X.data().end(), [](double v) { return v >= 0; });
        return NaiveBayesModel::fit(view, multinomial, config);
      }
      case Algorithm::knn: return KnnModel::fit(view, config);
      case Algorithm::tree: return TreeModel::fit(view, config);
      case Algorithm::forest: return ForestModel::fit(view, config, seed);
      case Algorithm::svm_smo: return SvmModel::fit(view, config, seed);
    }
    throw InvalidArgument("unknown algorithm");
  }();
  return TrainedModel(algorithm, std::move(classes), X.cols(), X.provenance(), seed, std::move(params));
}

inline Prediction predict(const TrainedModel& model, std::span<const double> x) { return model.predict(x); }

// ----------------------------------------------------------- persistence
//
// Models are stored as JSON documents:
//   {"format": "mtsim-model", "version": 1, "algorithm": "...",
//    "classes": [...], "n_features": N, "provenance": "content", "seed": S,
//    "params": {...algorithm specific...}}
// Doubles are written with round-trip precision, so a loaded model predicts
// bit-identically to the saved one.

inline constexpr int kModelFormatVersion = 1;

namespace model_detail {

using nlohmann::json;

inline json tree_to_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes())
    nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}, {"d", n.distribution}});
  return nodes;
}

inline DecisionTree tree_from_json(const json& j, std::size_t n_classes) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at("f").get<std::int64_t>();
    node.threshold = n.at("t").get<double>();
    node.left = n.at("l").get<std::uint32_t>();
    node.right = n.at("r").get<std::uint32_t>();
    node.distribution = n.at("d").get<std::vector<double>>();
    nodes.push_back(std::move(node));
  }
  if (nodes.empty()) throw InvalidArgument("tree has no nodes");
  return DecisionTree::from_nodes(std::move(nodes), n_classes);
}

struct ParamsToJson {
  json operator()(const NaiveBayesModel& m) const {
    return {{"multinomial", m.multinomial}, {"cols", m.cols},     {"log_prior", m.log_prior},
            {"mean", m.mean},               {"var", m.var},       {"log_theta", m.log_theta}};
  }
  json operator()(const KnnModel& m) const {
    return {{"k", m.k}, {"cols", m.cols}, {"n_classes", m.n_classes}, {"rows", m.rows}, {"labels", m.labels}};
  }
  json operator()(const TreeModel& m) const { return {{"nodes", tree_to_json(m.tree)}}; }
  json operator()(const ForestModel& m) const {
    json trees = json::array();
    for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
    return {{"n_classes", m.n_classes}, {"trees", trees}};
  }
  json operator()(const SvmModel& m) const {
    std::vector<int> conv(m.converged.begin(), m.converged.end());
    return {{"cols", m.cols},   {"mean", m.mean}, {"scale", m.scale},
            {"weights", m.weights}, {"bias", m.bias}, {"converged", conv}};
  }
};

}  // namespace model_detail

inline nlohmann::json model_to_json(const TrainedModel& m) {
  nlohmann::json j;
  j["format"] = "mtsim-model";
  j["version"] = kModelFormatVersion;
  j["algorithm"] = std::string(name(m.algorithm()));
  j["classes"] = m.classes();
  j["n_features"] = m.n_features();
  j["provenance"] = m.provenance().empty() ? std::string() : m.provenance().label();
  j["seed"] = m.seed();
  j["params"] = std::visit(model_detail::ParamsToJson{}, m.params());
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "mtsim-model") throw InvalidArgument("not an mtsim model");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw InvalidArgument("unsupported model format version " + std::to_string(j.at("version").get<int>()));
    const auto algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    auto classes = j.at("classes").get<std::vector<std::string>>();
    const auto n_features = j.at("n_features").get<std::size_t>();
    const auto prov_label = j.at("provenance").get<std::string>();
    const auto prov = prov_label.empty() ? features::FeatureSets{} : features::FeatureSets::parse(prov_label);
    const auto seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("params");
    const std::size_t k = classes.size();

    TrainedModel::Params params;
    switch (algorithm) {
      case Algorithm::naive_bayes: {
        NaiveBayesModel m;
        m.multinomial = p.at("multinomial").get<bool>();
        m.cols = p.at("cols").get<std::size_t>();
        m.log_prior = p.at("log_prior").get<std::vector<double>>();
        m.mean = p.at("mean").get<std::vector<double>>();
        m.var = p.at("var").get<std::vector<double>>();
        m.log_theta = p.at("log_theta").get<std::vector<double>>();
        const auto expect = m.multinomial ? m.log_theta.size() : m.mean.size();
        if (m.log_prior.size() != k || expect != k * m.cols || (!m.multinomial && m.var.size() != k * m.cols))
          throw InvalidArgument("naive Bayes parameter sizes are inconsistent");
        params = std::move(m);
        break;
      }
      case Algorithm::knn: {
        KnnModel m;
        m.k = p.at("k").get<std::size_t>();
        m.cols = p.at("cols").get<std::size_t>();
        m.n_classes = p.at("n_classes").get<std::size_t>();
        m.rows = p.at("rows").get<std::vector<double>>();
        m.labels = p.at("labels").get<std::vector<std::size_t>>();
        if (m.rows.size() != m.labels.size() * m.cols || m.n_classes != k)
          throw InvalidArgument("knn parameter sizes are inconsistent");
        params = std::move(m);
        break;
      }
      case Algorithm::tree:
        params = TreeModel{model_detail::tree_from_json(p.at("nodes"), k)};
        break;
      case Algorithm::forest: {
        ForestModel m;
        m.n_classes = p.at("n_classes").get<std::size_t>();
        for (const auto& t : p.at("trees")) m.trees.push_back(model_detail::tree_from_json(t, k));
        if (m.trees.empty() || m.n_classes != k) throw InvalidArgument("forest parameters are inconsistent");
        params = std::move(m);
        break;
      }
      case Algorithm::svm_smo: {
        SvmModel m;
        m.cols = p.at("cols").get<std::size_t>();
        m.mean = p.at("mean").get<std::vector<double>>();
        m.scale = p.at("scale").get<std::vector<double>>();
        m.weights = p.at("weights").get<std::vector<double>>();
        m.bias = p.at("bias").get<std::vector<double>>();
        const auto conv = p.at("converged").get<std::vector<int>>();
        m.converged.assign(conv.begin(), conv.end());
        if (m.mean.size() != m.cols || m.scale.size() != m.cols || m.weights.size() != k * m.cols ||
            m.bias.size() != k)
          throw InvalidArgument("svm parameter sizes are inconsistent");
        params = std::move(m);
        break;
      }
    }
    return TrainedModel(algorithm, std::move(classes), n_features, prov, seed, std::move(params));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model document: ") + e.what());
  }
}

inline void save_model(const TrainedModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << model_to_json(m).dump() << '\n';
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model file: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace mtsim::learn
