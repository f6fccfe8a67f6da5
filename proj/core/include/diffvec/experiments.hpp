#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "diffvec/embedding_store.hpp"
#include "diffvec/relation_dataset.hpp"
#include "diffvec/report.hpp"
#include "diffvec/spectral_clustering.hpp"
#include "diffvec/svm.hpp"

namespace diffvec {

// Every experiment first drops triples with out-of-vocabulary words, exact
// duplicates and pairs listed under several relations, and records the
// counts in the report.

struct ClusteringOptions {
  std::vector<std::size_t> k_values = {10, 20, 30, 40, 50, 60, 70, 80};
  double dev_fraction = 0.15;
  ClusterConfig base;                // subsample cap and restarts
  std::vector<ClusterConfig> grid;  // empty: default_grid(k_values, base)
  std::uint64_t seed = 1;
};

// Tunes the similarity on a random dev split, then sweeps k over the rest.
EvalReport run_clustering_experiment(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                     const ClusteringOptions& options);

struct ClosedWorldOptions {
  std::size_t folds = 10;
  double C = 1.0;
  std::uint64_t seed = 1;
};

// k-fold cross-validation of the one-vs-rest linear SVM.
EvalReport run_closed_world(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                            const ClosedWorldOptions& options);
// The same classifier trained on every instance.
LinearModel train_closed_world_model(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                     const ClosedWorldOptions& options);

struct BaselineOptions {
  std::size_t clusters = 50;
  std::size_t folds = 10;
  Similarity measure = Similarity::rbf;
  double gamma = 1.0;
  std::size_t subsample_cap = 4000;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
};

// Clusters all instances once; in each fold a cluster predicts the majority
// relation of its training members. Ties and clusters without training
// members fall back to the most frequent training relation.
EvalReport run_baseline_cluster_majority(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                         const BaselineOptions& options);

struct OpenWorldOptions {
  double train_fraction = 2.0 / 3.0;
  bool stratified = true;
  double C = 1.0;
  double gamma = 0.0;  // <= 0: default_gamma of the gold training vectors
  std::size_t lexicon_size = 500;
  double random_ratio = 1.0;  // random pairs per test instance
  std::uint64_t seed = 1;
};

// One binary RBF SVM per relation. Training negatives are the other
// relations' training pairs; the "neg" variant adds opposite and shuffled
// pairs of the relation itself. All classifiers share one test set of held
// out gold pairs plus random pairs. A random pair counts as correct only if
// `annotations` lists it under the predicted relation. Recall is relative to
// the pool of correct pairs found by any variant plus the held out gold.
// With `with_negatives` both variants are run and reported.
EvalReport run_open_world(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                          const FrequencyList& freq, std::span<const RelationTriple> annotations, bool with_negatives,
                          const OpenWorldOptions& options);

struct LexicalOptions {
  std::vector<std::size_t> multipliers = {0, 1, 2, 3, 4, 5};
  double test_word_fraction = 1.0 / 3.0;
  double C = 1.0;
  double gamma = 0.0;
  std::size_t lexicon_size = 500;
  std::uint64_t seed = 1;
};

// Train and test vocabularies are disjoint. For multiplier m the test set is
// augmented with m times its size in random pairs over test-side words; the
// pairs for smaller m are a prefix of those for larger m.
EvalReport run_lexical_memorisation(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                    const FrequencyList& freq, const LexicalOptions& options);

// |correct ∩ positives(model)| / |correct ∩ union of all positives|; 1 when
// that pool is empty.
std::map<std::string, double> relative_recall(const std::map<std::string, std::set<WordPair>>& positives,
                                              const std::set<WordPair>& correct);

// Triples whose relation belongs to `inventory`, relabelled canonically.
std::vector<RelationTriple> restrict_to_inventory(std::span<const RelationTriple> triples,
                                                  const RelationInventory& inventory);

}  // namespace diffvec
