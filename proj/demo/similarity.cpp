// Clusters a synthetic corpus by required action using a WordNet directory
// (default: the test fixture) and prints the category distribution.
//
//   demo_similarity [wordnet-dir]

#include <iostream>

#include "mtsim/mtsim.hpp"

int main(int argc, char** argv) {
  using namespace mtsim;
  const std::string dir = argc > 1 ? argv[1] : "tests/fixtures/mini-wordnet";
  try {
    const auto wn = wordnet::load_wordnet(dir);
    synth::SynthConfig sc;
    sc.per_category = 20;
    const auto corpus = synth::generate_synthetic_corpus(sc);

    const auto& first = corpus.tasks.front();
    std::cout << first.title << "\n";
    for (const auto& p : semsim::extract_verb_phrases(first, wn)) std::cout << "  [" << p.surface << "]\n";

    const auto sim = semsim::required_action_matrix(corpus.tasks, wn);
    const auto c = cluster::k_medoids(sim, 5, 7);
    std::cout << "\npurity " << report::fixed(cluster::purity(c, corpus), 3) << "\n";
    std::cout << cluster::distribution_text(cluster::category_distribution(c, corpus), corpus.categories());
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
