#pragma once

// Command-line front end: ingest, synth, cv, grid, sim, cluster, report.
// Reports start with "# key=value" header lines; files are written through
// a temporary sibling and renamed into place.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cluster.hpp"
#include "corpus.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "report.hpp"
#include "semsim.hpp"
#include "synth.hpp"
#include "version.hpp"
#include "wordnet.hpp"

namespace mtsim::cli {

struct RunConfig {
  std::string corpus_path;
  std::string wordnet_dir;
  std::string wordlist_path;
  std::string lexicon_path;
  std::uint64_t seed = 7;
  std::size_t folds = 10;
  std::string sets = "content";
  std::string algorithms = "svm_smo";
  std::size_t cluster_k = cluster::kDefaultK;
  std::string method = "pam";
  std::string measure = "required_action";
  std::string out;
  std::string format = "text";
  unsigned threads = 1;
  bool strict = false;
  std::size_t categories = 5;
  std::size_t per_category = 60;
  std::string assignments;
  std::string input;
};

namespace detail {

using Header = std::vector<std::pair<std::string, std::string>>;

inline void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InvalidArgument(std::string(what) + " path is required");
  if (!std::filesystem::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path);
}

inline void require_dir(const std::string& path, const char* what) {
  if (!std::filesystem::is_directory(path)) throw IoError(std::string(what) + " not found: " + path);
}

inline void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.out.empty()) out << content;
  else report::write_atomic(cfg.out, content);
}

inline std::vector<features::FeatureSets> parse_sets(const std::string& spec) {
  if (spec == "all-combos") return features::all_combinations();
  return {features::FeatureSets::parse(spec)};
}

inline std::vector<learn::Algorithm> parse_algorithms(const std::string& spec) {
  std::vector<learn::Algorithm> out;
  if (spec == "all") return {std::begin(learn::kAllAlgorithms), std::end(learn::kAllAlgorithms)};
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(learn::parse_algorithm(item));
  if (out.empty()) throw InvalidArgument("no algorithm given");
  return out;
}

inline Corpus load(const RunConfig& cfg) { return load_corpus(cfg.corpus_path, cfg.strict).corpus; }

inline eval::CvConfig cv_config(const RunConfig& cfg) {
  eval::CvConfig cv;
  cv.folds = cfg.folds;
  cv.seed = cfg.seed;
  cv.threads = cfg.threads;
  if (!cfg.lexicon_path.empty()) cv.pipeline.lexicon = features::load_sentiment_lexicon(cfg.lexicon_path);
  return cv;
}

inline Header common_header(const char* command, const RunConfig& cfg) {
  return {{"command", command}, {"seed", std::to_string(cfg.seed)}, {"corpus", cfg.corpus_path}};
}

// ----------------------------------------------------------- subcommands

inline std::string run_ingest(const RunConfig& cfg) {
  const auto res = load_corpus(cfg.corpus_path, cfg.strict);
  const auto& q = res.report;
  auto h = common_header("ingest", cfg);
  h.emplace_back("strict", cfg.strict ? "true" : "false");
  std::string body;
  if (cfg.format == "csv") {
    body += "metric,value\n";
    auto row = [&](const std::string& k, std::size_t v) { body += report::csv_row({k, std::to_string(v)}) + "\n"; };
    row("lines_read", q.lines_read);
    row("records_loaded", q.records_loaded);
    row("records_skipped", q.records_skipped);
    row("unknown_fields", q.unknown_fields);
    for (const auto& [f, n] : q.defaulted_fields) row("defaulted[" + f + "]", n);
    for (const auto& [c, n] : res.corpus.category_counts) row("category[" + c + "]", n);
    return report::header(h) + body;
  }
  std::vector<std::vector<std::string>> rows = {{"Metric", "Value"},
                                                {"lines read", std::to_string(q.lines_read)},
                                                {"records loaded", std::to_string(q.records_loaded)},
                                                {"records skipped", std::to_string(q.records_skipped)},
                                                {"unknown fields", std::to_string(q.unknown_fields)}};
  for (const auto& [f, n] : q.defaulted_fields) rows.push_back({"defaulted " + f, std::to_string(n)});
  body += report::aligned_table(rows) + "\n";
  std::vector<std::vector<std::string>> cats = {{"Category", "Tasks"}};
  for (const auto& [c, n] : res.corpus.category_counts) cats.push_back({c, std::to_string(n)});
  body += report::aligned_table(cats);
  if (!q.problems.empty()) {
    body += "\nproblems\n";
    for (const auto& p : q.problems) body += "  " + p + "\n";
  }
  return report::header(h) + body;
}

inline std::string run_cv(const RunConfig& cfg) {
  const auto sets = features::FeatureSets::parse(cfg.sets);
  const auto algos = parse_algorithms(cfg.algorithms);
  if (algos.size() != 1) throw InvalidArgument("cv takes exactly one algorithm; use grid for several");
  const auto corpus = load(cfg);
  const auto cv = cv_config(cfg);
  const auto r = eval::cross_validate(corpus, sets, algos.front(), cv);
  auto h = common_header("cv", cfg);
  h.emplace_back("config", r.config_echo);
  if (cfg.format == "csv") {
    std::string body = report::csv_row(eval::csv_columns(r.classes)) + "\n" + report::csv_row(eval::csv_fields(r)) + "\n";
    return report::header(h) + body;
  }
  eval::GridResult g{{sets}, {algos.front()}, {r}};
  return report::header(h) + eval::to_text(g) + "\n" + eval::to_text(r);
}

inline std::string run_grid(const RunConfig& cfg) {
  const auto sets = parse_sets(cfg.sets);
  const auto algos = parse_algorithms(cfg.algorithms);
  const auto corpus = load(cfg);
  const auto g = eval::grid_run(corpus, sets, algos, cv_config(cfg));
  auto h = common_header("grid", cfg);
  h.emplace_back("sets", cfg.sets);
  h.emplace_back("algorithms", cfg.algorithms);
  h.emplace_back("folds", std::to_string(cfg.folds));
  return report::header(h) + (cfg.format == "csv" ? eval::to_csv(g) : eval::to_text(g));
}

inline semsim::SimilarityMatrix similarity(const RunConfig& cfg, const Corpus& corpus) {
  const auto measure = semsim::parse_measure(cfg.measure);
  semsim::SimilarityResources res;
  res.threads = cfg.threads;
  std::optional<wordnet::WordNetGraph> wn;
  std::optional<semsim::Wordlist> words;
  if (measure == semsim::Measure::required_action) {
    wn = wordnet::load_wordnet(cfg.wordnet_dir);
    res.wordnet = &*wn;
  } else if (!cfg.wordlist_path.empty()) {
    words = semsim::load_wordlist(cfg.wordlist_path);
    res.wordlist = &*words;
  }
  return semsim::similarity_matrix(corpus, measure, res);
}

inline void check_similarity_resources(const RunConfig& cfg) {
  const auto measure = semsim::parse_measure(cfg.measure);
  if (measure == semsim::Measure::required_action) {
    if (cfg.wordnet_dir.empty()) throw InvalidArgument("--measure required_action needs --wordnet <dir>");
    require_dir(cfg.wordnet_dir, "WordNet directory");
  }
  if (!cfg.wordlist_path.empty()) require_file(cfg.wordlist_path, "word list");
}

inline Header similarity_header(const char* command, const RunConfig& cfg) {
  auto h = common_header(command, cfg);
  h.emplace_back("measure", cfg.measure);
  h.emplace_back("wordnet", cfg.wordnet_dir);
  h.emplace_back("wordlist", cfg.wordlist_path.empty() ? "built-in" : cfg.wordlist_path);
  return h;
}

inline std::string run_sim(const RunConfig& cfg) {
  check_similarity_resources(cfg);
  const auto corpus = load(cfg);
  const auto m = similarity(cfg, corpus);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"task_id"};
  head.insert(head.end(), m.task_ids.begin(), m.task_ids.end());
  rows.push_back(std::move(head));
  const int decimals = cfg.format == "csv" ? 6 : 3;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::string> row{m.task_ids[i]};
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(report::fixed(m.at(i, j), decimals));
    rows.push_back(std::move(row));
  }
  std::string body;
  if (cfg.format == "csv")
    for (const auto& r : rows) body += report::csv_row(r) + "\n";
  else
    body = report::aligned_table(rows);
  return report::header(similarity_header("sim", cfg)) + body;
}

inline std::string run_cluster(const RunConfig& cfg) {
  check_similarity_resources(cfg);
  if (cfg.method != "pam" && cfg.method != "average") throw InvalidArgument("unknown method: " + cfg.method);
  const auto corpus = load(cfg);
  const auto m = similarity(cfg, corpus);
  const auto c = cfg.method == "pam" ? cluster::k_medoids(m, cfg.cluster_k, cfg.seed, cluster::kDefaultMaxIter, cfg.threads)
                                     : cluster::agglomerative(m, cfg.cluster_k);
  const auto dist = cluster::category_distribution(c, corpus);
  auto h = similarity_header("cluster", cfg);
  h.emplace_back("method", cfg.method);
  h.emplace_back("k", std::to_string(cfg.cluster_k));
  h.emplace_back("total_dissimilarity", report::fixed(c.total_dissimilarity, 6));
  h.emplace_back("purity", report::fixed(cluster::purity(c, corpus), 6));
  if (!cfg.assignments.empty())
    report::write_atomic(cfg.assignments, report::header(h) + cluster::assignments_csv(c));
  const auto cats = corpus.categories();
  return report::header(h) +
         (cfg.format == "csv" ? cluster::distribution_csv(dist, cats) : cluster::distribution_text(dist, cats));
}

/// Re-renders a CSV report as an aligned text table, keeping its header.
inline std::string run_report(const RunConfig& cfg) {
  require_file(cfg.input, "input report");
  std::ifstream in(cfg.input, std::ios::binary);
  std::string line, head;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("#")) head += line + "\n";
    else if (!line.empty()) rows.push_back(report::parse_csv_row(line));
  }
  if (cfg.format == "csv") {
    std::string body;
    for (const auto& r : rows) body += report::csv_row(r) + "\n";
    return head + body;
  }
  return head + report::aligned_table(rows);
}

inline std::string run_synth(const RunConfig& cfg) {
  synth::SynthConfig s;
  s.seed = cfg.seed;
  s.categories = cfg.categories;
  s.per_category = cfg.per_category;
  return synth::to_jsonl(synth::generate_synthetic_corpus(s));
}

}  // namespace detail

/// Parses argv, runs one subcommand and returns the exit status. Reports go
/// to --out when given, otherwise to `out`; diagnostics go to `err`.
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Micro-task classification and similarity toolkit", "mtsim"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto shared = [&](CLI::App* sub, bool needs_corpus) {
    auto* c = sub->add_option("--corpus", cfg.corpus_path, "corpus JSONL file");
    if (needs_corpus) c->required();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output file (stdout when omitted)");
    sub->add_option("--format", cfg.format, "csv or text")->check(CLI::IsMember({"csv", "text"}))->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "load a corpus and report its quality");
  shared(ingest, true);
  ingest->add_flag("--strict", cfg.strict, "abort on the first invalid record");

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus as JSONL");
  synth_cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--out", cfg.out, "output file (stdout when omitted)");
  synth_cmd->add_option("--categories", cfg.categories, "number of categories")
      ->check(CLI::Range(std::size_t{1}, synth::kBanks.size()))
      ->capture_default_str();
  synth_cmd->add_option("--per-category", cfg.per_category, "tasks per category")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto classification = [&](CLI::App* sub) {
    shared(sub, true);
    sub->add_option("--sets", cfg.sets, "feature sets, comma separated, or all-combos")->capture_default_str();
    sub->add_option("--algo", cfg.algorithms, "algorithm(s), comma separated, or all")->capture_default_str();
    sub->add_option("--folds", cfg.folds, "cross-validation folds")->check(CLI::Range(std::size_t{2}, std::size_t{1000}))->capture_default_str();
    sub->add_option("--lexicon", cfg.lexicon_path, "sentiment lexicon (word<TAB>+1|-1)")->check(CLI::ExistingFile);
    sub->add_flag("--strict", cfg.strict, "abort on the first invalid record");
  };
  auto* cv = app.add_subcommand("cv", "stratified cross-validation of one cell");
  classification(cv);
  auto* grid = app.add_subcommand("grid", "cross-validation over feature sets x algorithms");
  classification(grid);

  auto similarity_opts = [&](CLI::App* sub) {
    shared(sub, true);
    sub->add_option("--measure", cfg.measure, "required_action or comprehensibility")
        ->check(CLI::IsMember({"required_action", "comprehensibility"}))
        ->capture_default_str();
    sub->add_option("--wordnet", cfg.wordnet_dir, "WordNet database directory");
    sub->add_option("--wordlist", cfg.wordlist_path, "English word list, one word per line");
    sub->add_flag("--strict", cfg.strict, "abort on the first invalid record");
  };
  auto* sim = app.add_subcommand("sim", "pairwise task similarity matrix");
  similarity_opts(sim);
  auto* clus = app.add_subcommand("cluster", "cluster tasks and report category distributions");
  similarity_opts(clus);
  clus->add_option("--k", cfg.cluster_k, "number of clusters")->capture_default_str();
  clus->add_option("--method", cfg.method, "pam or average")->check(CLI::IsMember({"pam", "average"}))->capture_default_str();
  clus->add_option("--assignments", cfg.assignments, "also write per-task assignments (CSV) here");

  auto* rep = app.add_subcommand("report", "render a CSV report as an aligned table");
  rep->add_option("--in", cfg.input, "CSV report written by cv, grid, sim or cluster")->required();
  rep->add_option("--out", cfg.out, "output file (stdout when omitted)");
  rep->add_option("--format", cfg.format, "csv or text")->check(CLI::IsMember({"csv", "text"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (!cfg.corpus_path.empty()) detail::require_file(cfg.corpus_path, "corpus");
    std::string content;
    if (ingest->parsed()) content = detail::run_ingest(cfg);
    else if (synth_cmd->parsed()) content = detail::run_synth(cfg);
    else if (cv->parsed()) content = detail::run_cv(cfg);
    else if (grid->parsed()) content = detail::run_grid(cfg);
    else if (sim->parsed()) content = detail::run_sim(cfg);
    else if (clus->parsed()) content = detail::run_cluster(cfg);
    else content = detail::run_report(cfg);
    detail::emit(cfg, content, out);
  } catch (const std::exception& e) {
    err << "mtsim: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mtsim::cli
