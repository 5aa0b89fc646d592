#include <gtest/gtest.h>

#include <set>

#include "mtsim/cli.hpp"
#include "mtsim/synth.hpp"
#include "support.hpp"

using namespace mtsim;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mtsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string mini_wordnet() { return testsupport::fixture("mini-wordnet").string(); }

// Small synthetic corpus on disk, shared by the CLI tests.
std::string corpus_file() {
  static const std::string path = [] {
    const auto dir = testsupport::scratch_dir("cli-corpus");
    const auto p = (dir / "tasks.jsonl").string();
    const auto r = run({"synth", "--seed", "3", "--categories", "3", "--per-category", "10", "--out", p});
    EXPECT_EQ(r.status, 0) << r.err;
    return p;
  }();
  return path;
}

}  // namespace

TEST(Synth, DefaultShape) {
  const auto corpus = synth::generate_synthetic_corpus();
  EXPECT_EQ(corpus.size(), 300u);
  ASSERT_EQ(corpus.categories().size(), 5u);
  for (const auto& [cat, n] : corpus.category_counts) EXPECT_EQ(n, 60u) << cat;
  std::set<std::string> ids;
  for (const auto& t : corpus.tasks) {
    ids.insert(t.id);
    const auto words = text::tokenize(t.description_text).size();
    EXPECT_GE(words, 20u);
    EXPECT_LE(words, 40u);
    EXPECT_GT(t.payment, 0.0);
    EXPECT_GT(t.time_to_finish, 0.0);
    EXPECT_LE(t.jobs_done, t.positions);
    EXPECT_EQ(t.description_text.find('<'), std::string::npos);
  }
  EXPECT_EQ(ids.size(), 300u);
  EXPECT_EQ(corpus.tasks.front().id, "synth-0001");
}

TEST(Synth, SeededAndDeterministic) {
  const auto a = synth::to_jsonl(synth::generate_synthetic_corpus({11, 4, 5}));
  EXPECT_EQ(a, synth::to_jsonl(synth::generate_synthetic_corpus({11, 4, 5})));
  EXPECT_NE(a, synth::to_jsonl(synth::generate_synthetic_corpus({12, 4, 5})));
  EXPECT_THROW(synth::generate_synthetic_corpus({1, 0, 5}), InvalidArgument);
  EXPECT_THROW(synth::generate_synthetic_corpus({1, 7, 5}), InvalidArgument);
  EXPECT_THROW(synth::generate_synthetic_corpus({1, 2, 0}), InvalidArgument);
}

TEST(Synth, SignatureSetsAreDisjoint) {
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& bank : synth::kBanks) {
    for (auto w : bank.verbs) seen.emplace(w), ++total;
    for (auto w : bank.nouns) seen.emplace(w), ++total;
  }
  EXPECT_EQ(total, synth::kBanks.size() * 15);
  EXPECT_EQ(seen.size(), total);
  std::set<std::string> noise(synth::kNoisePool.begin(), synth::kNoisePool.end());
  EXPECT_EQ(noise.size(), synth::kNoisePool.size());
  for (const auto& w : noise) EXPECT_EQ(seen.count(w), 0u) << w;
}

TEST(Synth, DescriptionsUseOwnSignatureWords) {
  const auto corpus = synth::generate_synthetic_corpus({5, 5, 20});
  for (const auto& t : corpus.tasks) {
    const auto bank = std::find_if(synth::kBanks.begin(), synth::kBanks.end(),
                                   [&](const auto& b) { return b.name == t.category; });
    ASSERT_NE(bank, synth::kBanks.end());
    std::set<std::string> own;
    for (auto w : bank->verbs) own.emplace(w);
    for (auto w : bank->nouns) own.emplace(w);
    const std::set<std::string> noise(synth::kNoisePool.begin(), synth::kNoisePool.end());
    std::size_t sig = 0, n = 0;
    for (const auto& tok : text::tokenize(t.description_text)) {
      const auto w = text::to_lower(tok.surface);
      ++n;
      if (own.count(w)) ++sig;
      else EXPECT_EQ(noise.count(w), 1u) << t.id << " " << w;
    }
    EXPECT_EQ(sig, static_cast<std::size_t>(std::lround(0.6 * static_cast<double>(n)))) << t.id;
  }
}

TEST(Cli, SynthOutputIsALoadableCorpus) {
  const auto r = run({"synth", "--seed", "3", "--categories", "2", "--per-category", "4"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream in(r.out);
  const auto loaded = load_corpus(in, true);
  EXPECT_EQ(loaded.corpus.size(), 8u);
  EXPECT_EQ(loaded.report.records_skipped, 0u);
  EXPECT_EQ(synth::to_jsonl(loaded.corpus), r.out);
}

TEST(Cli, IngestReportsQuality) {
  const auto r = run({"ingest", "--corpus", corpus_file(), "--format", "csv"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# mtsim ", 0), 0u);
  EXPECT_NE(r.out.find("\n# command=ingest\n"), std::string::npos);
  EXPECT_NE(r.out.find("records_loaded,30\n"), std::string::npos);
  EXPECT_NE(r.out.find("category[Youtube],10\n"), std::string::npos);
}

TEST(Cli, CvAndGrid) {
  const auto cv = run({"cv", "--corpus", corpus_file(), "--folds", "3", "--algo", "naive_bayes", "--format", "csv"});
  ASSERT_EQ(cv.status, 0) << cv.err;
  EXPECT_NE(cv.out.find("\ncontent,naive_bayes,"), std::string::npos);
  const auto grid = run({"grid", "--corpus", corpus_file(), "--folds", "3", "--sets", "factual", "--algo",
                         "knn,tree", "--format", "csv"});
  ASSERT_EQ(grid.status, 0) << grid.err;
  EXPECT_NE(grid.out.find("\nfactual,knn,"), std::string::npos);
  EXPECT_NE(grid.out.find("\nfactual,tree,"), std::string::npos);
  const auto two = run({"cv", "--corpus", corpus_file(), "--algo", "knn,tree"});
  EXPECT_EQ(two.status, 1);
  EXPECT_NE(two.err.find("mtsim: error:"), std::string::npos);
}

TEST(Cli, SimAndCluster) {
  const auto sim = run({"sim", "--corpus", corpus_file(), "--wordnet", mini_wordnet(), "--format", "csv"});
  ASSERT_EQ(sim.status, 0) << sim.err;
  EXPECT_NE(sim.out.find("\ntask_id,synth-0001,"), std::string::npos);
  const auto dir = testsupport::scratch_dir("cli-cluster");
  const auto assign = (dir / "assign.csv").string();
  const auto cl = run({"cluster", "--corpus", corpus_file(), "--wordnet", mini_wordnet(), "--k", "3", "--format",
                       "csv", "--assignments", assign});
  ASSERT_EQ(cl.status, 0) << cl.err;
  EXPECT_NE(cl.out.find("\nCategory,A1,A2,A3\n"), std::string::npos);
  EXPECT_NE(testsupport::read_text(assign).find("task_id,cluster,medoid\n"), std::string::npos);
  const auto comp = run({"cluster", "--corpus", corpus_file(), "--measure", "comprehensibility", "--k", "3",
                         "--method", "average"});
  EXPECT_EQ(comp.status, 0) << comp.err;
}

TEST(Cli, MissingResourcesFail) {
  const auto no_wn = run({"cluster", "--corpus", corpus_file(), "--k", "3"});
  EXPECT_EQ(no_wn.status, 1);
  EXPECT_NE(no_wn.err.find("--wordnet"), std::string::npos);
  EXPECT_EQ(run({"ingest", "--corpus", "/nonexistent.jsonl"}).status, 1);
  EXPECT_NE(run({"frobnicate"}).status, 0);
  EXPECT_NE(run({}).status, 0);
  EXPECT_NE(run({"cluster", "--corpus", corpus_file(), "--wordnet", mini_wordnet(), "--k", "1"}).status, 0);
}

TEST(Cli, ReportRendersCsvAsTable) {
  const auto dir = testsupport::scratch_dir("cli-report");
  const auto csv = (dir / "grid.csv").string();
  ASSERT_EQ(run({"grid", "--corpus", corpus_file(), "--folds", "3", "--algo", "naive_bayes", "--format", "csv",
                 "--out", csv})
                .status,
            0);
  const auto r = run({"report", "--in", csv});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("# command=grid\n"), std::string::npos);
  EXPECT_NE(r.out.find("\nfeature_sets    algorithm  weighted_f1"), std::string::npos);
  EXPECT_EQ(r.out.find(",naive_bayes,"), std::string::npos);
  const auto back = run({"report", "--in", csv, "--format", "csv"});
  EXPECT_EQ(back.out, testsupport::read_text(csv));
}

TEST(Cli, OutputsAreByteIdenticalAcrossRunsAndThreads) {
  const std::vector<std::vector<std::string>> commands = {
      {"ingest", "--corpus", corpus_file()},
      {"synth", "--seed", "9", "--per-category", "5"},
      {"cv", "--corpus", corpus_file(), "--folds", "3", "--sets", "structural+content", "--algo", "forest"},
      {"grid", "--corpus", corpus_file(), "--folds", "3", "--sets", "content", "--algo", "all", "--format", "csv"},
      {"sim", "--corpus", corpus_file(), "--measure", "comprehensibility"},
      {"cluster", "--corpus", corpus_file(), "--wordnet", mini_wordnet(), "--k", "4"},
  };
  for (const auto& c : commands) {
    const auto a = run(c);
    ASSERT_EQ(a.status, 0) << c[0] << ": " << a.err;
    EXPECT_EQ(run(c).out, a.out) << c[0];
    auto threaded = c;
    if (c[0] != "synth") {
      threaded.insert(threaded.end(), {"--threads", "4"});
      EXPECT_EQ(run(threaded).out, a.out) << c[0] << " with threads";
    }
  }
}

TEST(Cli, OutFileIsWrittenWhole) {
  const auto dir = testsupport::scratch_dir("cli-out");
  const auto p = (dir / "s.jsonl").string();
  const auto r = run({"synth", "--per-category", "2", "--out", p});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(testsupport::read_text(p), run({"synth", "--per-category", "2"}).out);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
}
