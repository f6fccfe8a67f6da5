#include "diffvec/synthetic.hpp"

#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "diffvec/error.hpp"
#include "diffvec/prng.hpp"

namespace diffvec {

namespace {

std::vector<double> random_direction(Prng& rng, std::size_t dim, double norm) {
  std::vector<double> v(dim);
  double s = 0.0;
  do {
    for (double& x : v) x = rng.normal();
    s = l2_norm(v);
  } while (s == 0.0);
  for (double& x : v) x *= norm / s;
  return v;
}

std::string relation_label(std::size_t r, std::size_t total) {
  const auto& inv = total <= RelationInventory::classification().labels().size() ? RelationInventory::classification()
                                                                                  : RelationInventory::standard();
  if (r < inv.labels().size()) return inv.labels()[r];
  return "R" + std::to_string(r + 1);
}

}  // namespace

std::vector<DiffVecInstance> planted_diffvecs(std::size_t relations, std::size_t dim, std::size_t per_relation,
                                              double noise, std::uint64_t seed, double offset_norm) {
  if (relations == 0 || dim == 0 || per_relation == 0) throw Error("planted_diffvecs: sizes must be positive");
  if (noise < 0.0) throw Error("planted_diffvecs: noise must be non-negative");
  std::vector<DiffVecInstance> out;
  out.reserve(relations * per_relation);
  for (std::size_t r = 0; r < relations; ++r) {
    auto rng = Prng::split(seed, r);
    const auto offset = random_direction(rng, dim, offset_norm);
    const std::string label = relations <= RelationInventory::standard().labels().size()
                                  ? RelationInventory::standard().labels()[r]
                                  : "R" + std::to_string(r + 1);
    for (std::size_t i = 0; i < per_relation; ++i) {
      DiffVecInstance inst;
      inst.vector = offset;
      for (double& x : inst.vector) x += noise * rng.normal();
      inst.label = label;
      inst.pair = {"p" + std::to_string(r) + "_" + std::to_string(i) + "a",
                   "p" + std::to_string(r) + "_" + std::to_string(i) + "b"};
      out.push_back(std::move(inst));
    }
  }
  return out;
}

SyntheticWorld make_synthetic_world(const SyntheticWorldOptions& o) {
  if (o.relations == 0 || o.dim == 0 || o.pairs_per_relation == 0) throw Error("synthetic world: sizes must be positive");
  if (o.classes < 2) throw Error("synthetic world: at least 2 classes required");
  if (o.relations > o.classes * (o.classes - 1))
    throw Error("synthetic world: " + std::to_string(o.relations) + " relations need more than " +
                std::to_string(o.classes) + " classes");
  if (o.word_noise < 0.0 || o.pair_noise < 0.0) throw Error("synthetic world: noise must be non-negative");

  Prng rng(o.seed);
  std::vector<std::vector<double>> centroids;
  for (std::size_t c = 0; c < o.classes; ++c) centroids.push_back(random_direction(rng, o.dim, o.centroid_norm));

  // Distinct ordered class pairs, one per relation.
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t a = 0; a < o.classes; ++a)
    for (std::size_t b = 0; b < o.classes; ++b)
      if (a != b) links.emplace_back(a, b);
  rng.shuffle(std::span<std::pair<std::size_t, std::size_t>>(links));
  links.resize(o.relations);

  const double word_sd = o.word_noise / std::sqrt(static_cast<double>(o.dim));
  const double pair_sd = o.pair_noise / std::sqrt(static_cast<double>(o.dim));
  std::vector<std::string> words;
  std::vector<std::vector<double>> vectors;
  SyntheticWorld world;
  for (std::size_t r = 0; r < o.relations; ++r) {
    const auto [a, b] = links[r];
    const std::string label = relation_label(r, o.relations);
    for (std::size_t i = 0; i < o.pairs_per_relation; ++i) {
      std::vector<double> v1(o.dim), v2(o.dim);
      for (std::size_t k = 0; k < o.dim; ++k) {
        const double own = word_sd * rng.normal();
        v1[k] = centroids[a][k] + own;
        v2[k] = centroids[b][k] + own + pair_sd * rng.normal();
      }
      const std::string w1 = "r" + std::to_string(r) + "a" + std::to_string(i);
      const std::string w2 = "r" + std::to_string(r) + "b" + std::to_string(i);
      words.push_back(w1);
      vectors.push_back(std::move(v1));
      words.push_back(w2);
      vectors.push_back(std::move(v2));
      world.triples.push_back({label, w1, w2});
    }
  }
  for (std::size_t f = 0; f < o.filler_words; ++f) {
    const std::size_t c = static_cast<std::size_t>(rng.below(o.classes));
    std::vector<double> v(o.dim);
    for (std::size_t k = 0; k < o.dim; ++k) v[k] = centroids[c][k] + word_sd * rng.normal();
    words.push_back("f" + std::to_string(f));
    vectors.push_back(std::move(v));
  }

  std::vector<std::size_t> order(words.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::pair<std::string, std::uint64_t>> freq;
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    freq.emplace_back(words[order[rank]], static_cast<std::uint64_t>(std::llround(1e6 / static_cast<double>(rank + 1))) + 1);
  world.frequencies = FrequencyList(std::move(freq));

  world.table = EmbeddingTable(std::move(words), Matrix::from_rows(vectors), false, "synthetic");
  return world;
}

}  // namespace diffvec
