#pragma once

// k-medoids (PAM) and average-linkage clustering over a similarity matrix,
// with per-cluster category distributions and purity.

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "semsim.hpp"

namespace mtsim::cluster {

struct Clustering {
  std::vector<std::string> task_ids;
  std::vector<std::size_t> assignments;  // per task, cluster id in [0, k)
  std::vector<std::size_t> medoids;      // per cluster, task index; ascending
  std::size_t k = 0;
  double total_dissimilarity = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> history;  // objective after BUILD, then after each accepted swap
};

inline constexpr std::size_t kDefaultK = 15;
inline constexpr std::size_t kDefaultMaxIter = 100;

/// Dissimilarity view d = 1 - sim.
class Dissimilarity {
 public:
  explicit Dissimilarity(const semsim::SimilarityMatrix& sim) : sim_(sim) {}
  std::size_t size() const { return sim_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return i == j ? 0.0 : 1.0 - sim_.at(i, j); }

 private:
  const semsim::SimilarityMatrix& sim_;
};

/// Sum over points of the distance to the nearest medoid.
inline double medoid_cost(const Dissimilarity& d, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (std::size_t o = 0; o < d.size(); ++o) {
    double best = std::numeric_limits<double>::infinity();
    for (auto m : medoids) best = std::min(best, d(o, m));
    total += best;
  }
  return total;
}

namespace detail {

/// Sorts medoids, assigns every point to its nearest medoid (lowest cluster
/// id on ties, medoids to themselves) and recomputes the objective.
inline void finalize(Clustering& c, const Dissimilarity& d) {
  std::sort(c.medoids.begin(), c.medoids.end());
  c.k = c.medoids.size();
  c.assignments.assign(d.size(), 0);
  c.total_dissimilarity = 0.0;
  for (std::size_t o = 0; o < d.size(); ++o) {
    std::size_t best = 0;
    for (std::size_t m = 0; m < c.k; ++m) {
      if (c.medoids[m] == o) {
        best = m;
        break;
      }
      if (d(o, c.medoids[m]) < d(o, c.medoids[best])) best = m;
    }
    c.assignments[o] = best;
    c.total_dissimilarity += d(o, c.medoids[best]);
  }
}

}  // namespace detail

/// PAM. BUILD adds, one at a time, the point that most lowers the objective
/// (candidates scanned in a seeded random order, first wins on ties). Each
/// SWAP pass evaluates every (medoid, non-medoid) exchange and applies the
/// one with the lowest (cost, medoid index, candidate index) if it improves
/// the objective; passes stop when none does or after max_iter.
inline Clustering k_medoids(const semsim::SimilarityMatrix& sim, std::size_t k, std::uint64_t seed,
                            std::size_t max_iter = kDefaultMaxIter, unsigned threads = 1) {
  const Dissimilarity d(sim);
  const std::size_t n = d.size();
  if (k < 2 || k > n) throw InvalidArgument("k must be in [2, " + std::to_string(n) + "], got " + std::to_string(k));

  Clustering c;
  c.task_ids = sim.task_ids;
  c.seed = seed;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed);
  shuffle(order, rng);

  std::vector<char> is_medoid(n, 0);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t pick = n;
    double pick_cost = std::numeric_limits<double>::infinity();
    for (auto h : order) {
      if (is_medoid[h]) continue;
      double cost = 0.0;
      for (std::size_t o = 0; o < n; ++o) cost += std::min(nearest[o], d(o, h));
      if (cost < pick_cost) {
        pick_cost = cost;
        pick = h;
      }
    }
    is_medoid[pick] = 1;
    c.medoids.push_back(pick);
    for (std::size_t o = 0; o < n; ++o) nearest[o] = std::min(nearest[o], d(o, pick));
  }
  std::sort(c.medoids.begin(), c.medoids.end());
  double current = medoid_cost(d, c.medoids);
  c.history.push_back(current);

  using Candidate = std::tuple<double, std::size_t, std::size_t>;  // cost, medoid, candidate
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Nearest and second-nearest medoid distance per point.
    std::vector<double> d1(n), d2(n);
    std::vector<std::size_t> near(n);
    for (std::size_t o = 0; o < n; ++o) {
      d1[o] = d2[o] = std::numeric_limits<double>::infinity();
      for (auto m : c.medoids) {
        const double x = d(o, m);
        if (x < d1[o]) {
          d2[o] = d1[o];
          d1[o] = x;
          near[o] = m;
        } else if (x < d2[o]) {
          d2[o] = x;
        }
      }
    }
    std::vector<Candidate> best_per_h(n, {std::numeric_limits<double>::infinity(), n, n});
    parallel_for(n, threads, [&](std::size_t h) {
      if (is_medoid[h]) return;
      for (auto m : c.medoids) {
        double cost = 0.0;
        for (std::size_t o = 0; o < n; ++o) {
          const double keep = near[o] == m ? d2[o] : d1[o];
          cost += std::min(keep, d(o, h));
        }
        best_per_h[h] = std::min(best_per_h[h], Candidate{cost, m, h});
      }
    });
    const Candidate best = *std::min_element(best_per_h.begin(), best_per_h.end());
    if (!(std::get<0>(best) < current - 1e-12)) break;
    const auto [cost, m, h] = best;
    *std::find(c.medoids.begin(), c.medoids.end(), m) = h;
    std::sort(c.medoids.begin(), c.medoids.end());
    is_medoid[m] = 0;
    is_medoid[h] = 1;
    current = medoid_cost(d, c.medoids);
    c.history.push_back(current);
  }
  detail::finalize(c, d);
  return c;
}

/// Lowest objective over every k-subset of medoids. Exponential; test oracle.
inline double brute_force_cost(const semsim::SimilarityMatrix& sim, std::size_t k) {
  const Dissimilarity d(sim);
  const std::size_t n = d.size();
  std::vector<char> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), 1);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<std::size_t> medoids;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) medoids.push_back(i);
    best = std::min(best, medoid_cost(d, medoids));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

/// Average-linkage agglomerative clustering cut at k clusters. Merges the
/// pair with the lowest (average distance, i, j); each cluster's medoid is
/// the member with the smallest distance sum (lowest index on ties).
inline Clustering agglomerative(const semsim::SimilarityMatrix& sim, std::size_t k) {
  const Dissimilarity d(sim);
  const std::size_t n = d.size();
  if (k < 2 || k > n) throw InvalidArgument("k must be in [2, " + std::to_string(n) + "], got " + std::to_string(k));

  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  std::vector<double> link(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) link[i * n + j] = d(i, j);
  std::vector<char> alive(n, 1);

  for (std::size_t clusters = n; clusters > k; --clusters) {
    std::size_t bi = n, bj = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j)
        if (alive[j] && link[i * n + j] < best) {
          best = link[i * n + j];
          bi = i;
          bj = j;
        }
    }
    const double wi = static_cast<double>(members[bi].size());
    const double wj = static_cast<double>(members[bj].size());
    for (std::size_t x = 0; x < n; ++x) {
      if (!alive[x] || x == bi || x == bj) continue;
      const double v = (wi * link[bi * n + x] + wj * link[bj * n + x]) / (wi + wj);
      link[bi * n + x] = link[x * n + bi] = v;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
    alive[bj] = 0;
  }

  Clustering c;
  c.task_ids = sim.task_ids;
  std::vector<std::pair<std::size_t, const std::vector<std::size_t>*>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    std::size_t medoid = n;
    double best = std::numeric_limits<double>::infinity();
    auto sorted = members[i];
    std::sort(sorted.begin(), sorted.end());
    for (auto m : sorted) {
      double s = 0.0;
      for (auto o : sorted) s += d(o, m);
      if (s < best) {
        best = s;
        medoid = m;
      }
    }
    groups.emplace_back(medoid, &members[i]);
  }
  std::sort(groups.begin(), groups.end());
  c.k = groups.size();
  c.assignments.assign(n, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    c.medoids.push_back(groups[g].first);
    for (auto o : *groups[g].second) {
      c.assignments[o] = g;
      c.total_dissimilarity += d(o, groups[g].first);
    }
  }
  c.history.push_back(c.total_dissimilarity);
  return c;
}

// ------------------------------------------------------------ reporting

using Distribution = std::vector<std::map<std::string, double>>;  // per cluster; zero entries omitted

namespace detail {

inline std::vector<std::string> labels_in_order(const Clustering& c,
                                                const std::unordered_map<std::string, std::string>& labels) {
  std::vector<std::string> out;
  out.reserve(c.task_ids.size());
  for (const auto& id : c.task_ids) {
    const auto it = labels.find(id);
    if (it == labels.end()) throw InvalidArgument("no category for clustered task " + id);
    out.push_back(it->second);
  }
  return out;
}

inline std::unordered_map<std::string, std::string> corpus_labels(const Corpus& corpus) {
  std::unordered_map<std::string, std::string> out;
  for (const auto& t : corpus.tasks) out.emplace(t.id, t.category);
  return out;
}

inline std::vector<std::map<std::string, std::size_t>> counts(const Clustering& c,
                                                              const std::vector<std::string>& labels) {
  std::vector<std::map<std::string, std::size_t>> out(c.k);
  for (std::size_t o = 0; o < labels.size(); ++o) ++out.at(c.assignments[o])[labels[o]];
  return out;
}

}  // namespace detail

inline Distribution category_distribution(const Clustering& c, const Corpus& corpus) {
  if (corpus.size() != c.task_ids.size()) throw InvalidArgument("clustering and corpus differ in size");
  const auto labels = detail::labels_in_order(c, detail::corpus_labels(corpus));
  Distribution out;
  for (const auto& row : detail::counts(c, labels)) {
    std::size_t total = 0;
    for (const auto& [cat, n] : row) total += n;
    std::map<std::string, double> frac;
    for (const auto& [cat, n] : row) frac[cat] = static_cast<double>(n) / static_cast<double>(total);
    out.push_back(std::move(frac));
  }
  return out;
}

/// (1/N) * sum over clusters of the largest category count.
inline double purity(const Clustering& c, const std::unordered_map<std::string, std::string>& labels) {
  const auto ordered = detail::labels_in_order(c, labels);
  if (ordered.empty()) return 0.0;
  std::size_t sum = 0;
  for (const auto& row : detail::counts(c, ordered)) {
    std::size_t best = 0;
    for (const auto& [cat, n] : row) best = std::max(best, n);
    sum += best;
  }
  return static_cast<double>(sum) / static_cast<double>(ordered.size());
}

inline double purity(const Clustering& c, const Corpus& corpus) { return purity(c, detail::corpus_labels(corpus)); }

/// Rows = categories, columns A1..Ak, "-" for empty cells.
inline std::vector<std::vector<std::string>> distribution_rows(const Distribution& dist,
                                                               const std::vector<std::string>& categories) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"Category"};
  for (std::size_t a = 0; a < dist.size(); ++a) head.push_back("A" + std::to_string(a + 1));
  rows.push_back(std::move(head));
  for (const auto& cat : categories) {
    std::vector<std::string> row{cat};
    for (const auto& cl : dist) {
      const auto it = cl.find(cat);
      row.push_back(it == cl.end() || it->second == 0.0 ? "-" : report::fixed(it->second, 2));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string distribution_text(const Distribution& dist, const std::vector<std::string>& categories) {
  return report::aligned_table(distribution_rows(dist, categories));
}

inline std::string distribution_csv(const Distribution& dist, const std::vector<std::string>& categories) {
  std::string out;
  for (const auto& r : distribution_rows(dist, categories)) out += report::csv_row(r) + "\n";
  return out;
}

/// One row per task: task_id, cluster (A1-based name), medoid task id.
inline std::string assignments_csv(const Clustering& c) {
  std::string out = report::csv_row({"task_id", "cluster", "medoid"}) + "\n";
  for (std::size_t o = 0; o < c.task_ids.size(); ++o) {
    const auto a = c.assignments[o];
    out += report::csv_row({c.task_ids[o], "A" + std::to_string(a + 1), c.task_ids[c.medoids[a]]}) + "\n";
  }
  return out;
}

}  // namespace mtsim::cluster
