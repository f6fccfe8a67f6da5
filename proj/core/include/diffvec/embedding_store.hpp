#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diffvec/matrix.hpp"

namespace diffvec {

enum class EmbeddingFormat { text, binary };

EmbeddingFormat parse_embedding_format(std::string_view name);
std::string_view to_string(EmbeddingFormat format);

// Immutable word -> vector map. Rows keep file order.
//
// Invariants (checked by the constructor):
//   * every vector has exactly dim() finite components
//   * words are unique and non-empty
//   * normalized() implies every row has unit L2 norm within 1e-6
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> words, Matrix vectors, bool normalized,
                 std::string source_id);

  std::size_t dim() const { return vectors_.cols(); }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  bool normalized() const { return normalized_; }
  const std::string& source_id() const { return source_id_; }

  const std::vector<std::string>& words() const { return words_; }
  const Matrix& vectors() const { return vectors_; }

  bool contains(std::string_view word) const;
  std::optional<std::size_t> index_of(std::string_view word) const;
  // Throws Error for an unknown word.
  std::span<const double> lookup(std::string_view word) const;
  std::span<const double> row(std::size_t i) const { return vectors_.row(i); }

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  bool normalized_ = false;
  std::string source_id_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadOptions {
  EmbeddingFormat format = EmbeddingFormat::text;
  bool lowercase = false;
  // When set, rows for other words are skipped while reading.
  std::optional<std::set<std::string>> restrict_to;
};

struct LoadResult {
  EmbeddingTable table;
  std::size_t duplicate_words = 0;  // later occurrences dropped
  std::size_t skipped_words = 0;    // filtered by restrict_to
};

// Text: optional "<count> <dim>" header, then "word v1 ... vdim" per line.
// Binary: "<count> <dim>\n" then per word the word bytes, one space and dim
// little-endian float32 values. Duplicate words keep the first occurrence.
LoadResult load_embeddings(const std::filesystem::path& path, const LoadOptions& options = {});

// Text output uses shortest round-trip decimal formatting, binary output
// rounds to float32.
void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path,
                      EmbeddingFormat format);

EmbeddingTable normalize_unit(const EmbeddingTable& table);

// Multiplies every cell by factor / sigma, where sigma is the population
// standard deviation over all cells of the matrix.
EmbeddingTable scale_by_global_std(const EmbeddingTable& table, double factor);

std::set<std::string> vocab_intersection(std::span<const EmbeddingTable> tables);
std::set<std::string> vocab_intersection(std::span<const EmbeddingTable* const> tables);

struct NormStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};
NormStats norm_statistics(const EmbeddingTable& table);

}  // namespace diffvec
