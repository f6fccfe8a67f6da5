#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "diffvec/embedding_store.hpp"
#include "diffvec/relation_dataset.hpp"

namespace diffvec {

// Relation r gets a random offset of norm `offset_norm`; each instance is that
// offset plus isotropic Gaussian noise with per-coordinate deviation `noise`.
// Labels come from the standard inventory (R16, R17, ... beyond it).
std::vector<DiffVecInstance> planted_diffvecs(std::size_t relations, std::size_t dim, std::size_t per_relation,
                                              double noise, std::uint64_t seed, double offset_norm = 1.0);

// A vocabulary with semantic classes. Every word is its class centroid plus
// an individual deviation; relation r links class A_r to class B_r and its
// pairs satisfy v(w2) = v(w1) + c(B_r) - c(A_r) + small noise. Unrelated
// words drawn from A_r and B_r therefore form near-miss pairs for r.
struct SyntheticWorldOptions {
  std::size_t relations = 9;
  std::size_t classes = 6;
  std::size_t dim = 50;
  std::size_t pairs_per_relation = 60;
  double centroid_norm = 1.0;
  double word_noise = 0.5;   // expected norm of a word's deviation from its centroid
  double pair_noise = 0.05;  // expected norm of the per-pair noise
  std::size_t filler_words = 0;  // class members outside every relation
  std::uint64_t seed = 1;
};

struct SyntheticWorld {
  EmbeddingTable table;
  std::vector<RelationTriple> triples;
  FrequencyList frequencies;  // Zipf-like counts over the whole vocabulary
};

SyntheticWorld make_synthetic_world(const SyntheticWorldOptions& options);

}  // namespace diffvec
