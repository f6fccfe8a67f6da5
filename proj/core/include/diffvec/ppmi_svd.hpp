#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "diffvec/embedding_store.hpp"

namespace diffvec {

// Tokenised corpus with a frequency-thresholded vocabulary. Tokens are vocab
// ids; each segment is a run of text delimited by blank lines.
struct Corpus {
  std::vector<std::string> vocab;  // frequency descending, ties lexicographic
  std::vector<std::uint64_t> frequency;
  std::vector<std::vector<std::uint32_t>> segments;

  std::size_t token_count() const;
};

// Lowercases, drops tokens without an alphanumeric character, removes words
// seen fewer than min_count times. Throws when nothing survives.
Corpus preprocess_corpus(std::istream& text, std::uint64_t min_count, std::size_t max_vocab = 0);
Corpus preprocess_corpus(const std::string& text, std::uint64_t min_count, std::size_t max_vocab = 0);

struct CooccurrenceEntry {
  std::uint32_t word;
  std::uint32_t context;
  std::uint64_t count;
  friend bool operator==(const CooccurrenceEntry&, const CooccurrenceEntry&) = default;
};

// Sparse word-context counts over a shared vocabulary. `entries` is sorted by
// (word, context) and holds no zero counts.
struct CooccurrenceCounts {
  std::vector<std::string> vocab;
  std::vector<CooccurrenceEntry> entries;
  std::vector<std::uint64_t> word_totals;
  std::vector<std::uint64_t> context_totals;
  std::uint64_t total = 0;
  std::size_t window = 0;

  std::uint64_t count(std::uint32_t word, std::uint32_t context) const;
};

// Uniform symmetric window: every pair of positions within `window` of each
// other inside one segment adds 1 to (word_i, word_j).
CooccurrenceCounts build_cooccurrence(const Corpus& corpus, std::size_t window);

// Sums two count tables over the same vocabulary and window.
CooccurrenceCounts merge_counts(const CooccurrenceCounts& a, const CooccurrenceCounts& b);

struct SparseEntry {
  std::uint32_t row;
  std::uint32_t col;
  double value;
};

struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<SparseEntry> entries;  // sorted by (row, col)

  double at(std::uint32_t row, std::uint32_t col) const;
  Matrix to_dense() const;
};

// max(log[P(w,c) / (P(w) * P_cds(c))] - log(shift), 0) with
// P_cds(c) = n(c)^cds / sum_c' n(c')^cds. Only positive cells are stored.
SparseMatrix compute_ppmi(const CooccurrenceCounts& counts, double cds, double shift);

struct SvdEmbedding {
  EmbeddingTable table;
  std::vector<double> singular_values;  // non-increasing, length dim
  std::size_t rank_deficit = 0;         // trailing directions with zero singular value
};

// W = U_d * S_d^eig_weight, computed from the eigendecomposition of the
// smaller Gram matrix.
SvdEmbedding truncated_svd_embed(const SparseMatrix& matrix, const std::vector<std::string>& row_words,
                                 std::size_t dim, double eig_weight);

}  // namespace diffvec
