#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diffvec/embedding_store.hpp"
#include "diffvec/matrix.hpp"

namespace diffvec {

inline constexpr std::string_view kRandomLabel = "random";
inline constexpr std::string_view kNegativeLabel = "negative";

// Ordered set of relation labels. Lookup ignores case, '_' and '-', so
// "Verb_3", "verb3" and "VERB-3" all resolve to the same canonical entry.
class RelationInventory {
 public:
  explicit RelationInventory(std::vector<std::string> labels);

  // The 15 DiffVec relations.
  static const RelationInventory& standard();
  // The 9-relation subset used for supervised classification.
  static const RelationInventory& classification();

  std::optional<std::string> resolve(std::string_view label) const;
  bool contains(std::string_view label) const { return resolve(label).has_value(); }
  // Position in the inventory; labels outside it sort last.
  std::size_t rank(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> keys_;
};

struct RelationTriple {
  std::string relation;
  std::string word1;
  std::string word2;
  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
  friend auto operator<=>(const RelationTriple&, const RelationTriple&) = default;
};

using WordPair = std::pair<std::string, std::string>;

enum class Provenance { gold, opposite, shuffled, random };
std::string_view to_string(Provenance p);

struct DiffVecInstance {
  std::vector<double> vector;
  std::string label;
  Provenance provenance = Provenance::gold;
  WordPair pair;
};

// Stacks instance vectors into an n x dim matrix.
Matrix to_matrix(std::span<const DiffVecInstance> instances);
std::vector<std::string> labels_of(std::span<const DiffVecInstance> instances);

// TSV relation<TAB>word1<TAB>word2; blank lines and '#' comments skipped.
// Labels are canonicalised through `inventory`; "random" and "negative" are
// always accepted.
std::vector<RelationTriple> load_triples(const std::filesystem::path& path,
                                         const RelationInventory& inventory = RelationInventory::standard());
std::vector<RelationTriple> parse_triples(std::istream& in, const std::string& source,
                                          const RelationInventory& inventory = RelationInventory::standard());
void write_triples(std::span<const RelationTriple> triples, const std::filesystem::path& path);

struct FilterResult {
  std::vector<RelationTriple> triples;
  std::size_t dropped_oov = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t dropped_conflict = 0;  // same pair already kept under another relation
  std::size_t identical_forms = 0;   // word1 == word2 after case folding; kept
};

// Keeps triples with both words in `vocab`, removes exact duplicates and
// resolves pairs listed under several relations. Without `priority` the
// first-seen relation wins; with it, the relation ranked earliest wins.
FilterResult dedupe_and_filter(std::span<const RelationTriple> triples, const std::set<std::string>& vocab,
                               const RelationInventory* priority = nullptr);

// vector = v(word2) - v(word1). Throws on out-of-vocabulary words.
std::vector<DiffVecInstance> make_diffvecs(std::span<const RelationTriple> triples, const EmbeddingTable& table,
                                           Provenance provenance = Provenance::gold);

struct HoldoutSplit {
  std::vector<std::size_t> main;  // ascending indices
  std::vector<std::size_t> dev;   // ascending indices
  std::vector<std::string> warnings;
};

// Seeded partition of [0, labels.size()). Stratified splits round each
// relation's dev share separately; a relation with fewer than two items
// stays wholly in main.
HoldoutSplit split_holdout(std::span<const std::string> labels, double dev_fraction, std::uint64_t seed,
                           bool stratified);

struct LexicalSplit {
  std::vector<RelationTriple> train;
  std::vector<RelationTriple> test;
  std::set<std::string> train_words;
  std::set<std::string> test_words;
  std::size_t dropped = 0;  // triples straddling the two vocabularies
};

// Partitions the vocabulary (test_fraction of words go to test) and keeps
// triples whose words fall entirely on one side.
LexicalSplit lexical_split(std::span<const RelationTriple> triples, double test_fraction, std::uint64_t seed);

class FrequencyList {
 public:
  FrequencyList() = default;
  explicit FrequencyList(std::vector<std::pair<std::string, std::uint64_t>> entries);

  const std::vector<std::pair<std::string, std::uint64_t>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  // Entries whose word satisfies `keep`, order preserved.
  template <typename Pred>
  FrequencyList filtered(Pred keep) const {
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for (const auto& e : entries_)
      if (keep(e.first)) out.push_back(e);
    return FrequencyList(std::move(out));
  }

 private:
  std::vector<std::pair<std::string, std::uint64_t>> entries_;
};

// TSV word<TAB>count.
FrequencyList load_frequency_list(const std::filesystem::path& path);
void write_frequency_list(const FrequencyList& freq, const std::filesystem::path& path);

// Draws a seed lexicon of `lexicon_size` words without replacement with
// probability proportional to frequency, then samples `n` distinct ordered
// pairs uniformly from the lexicon's Cartesian product minus self-pairs and
// `exclude`. Output triples carry the label "random".
std::vector<RelationTriple> gen_random_pairs(const FrequencyList& freq, std::size_t lexicon_size, std::size_t n,
                                             const std::set<WordPair>& exclude, std::uint64_t seed);

// The lexicon-drawing step on its own.
std::vector<std::string> sample_lexicon(const FrequencyList& freq, std::size_t lexicon_size, std::uint64_t seed);

struct NegativeSamples {
  std::vector<DiffVecInstance> instances;  // label "negative"
  std::size_t opposite = 0;
  std::size_t shuffled = 0;
  std::size_t skipped_shuffles = 0;
  std::vector<std::string> warnings;
};

// One opposite pair (v(w1) - v(w2)) and one shuffled pair (v(w2') - v(w1))
// per gold instance. w2' is drawn uniformly from the relation's other word2
// values, avoiding pairs that are themselves gold pairs of that relation when
// an alternative exists.
NegativeSamples synth_negatives(std::span<const DiffVecInstance> gold, const EmbeddingTable& table,
                                std::uint64_t seed);

}  // namespace diffvec
