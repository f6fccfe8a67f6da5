#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffvec/matrix.hpp"
#include "diffvec/relation_dataset.hpp"

namespace diffvec {

enum class Similarity { rbf, cosine };
std::string_view to_string(Similarity s);
Similarity parse_similarity(std::string_view name);

struct ClusterConfig {
  std::size_t k = 10;
  Similarity measure = Similarity::rbf;
  double gamma = 1.0;  // rbf only
  std::size_t subsample_cap = 4000;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;

  // Throws unless k >= 2, gamma > 0 and subsample_cap >= k.
  void validate() const;
};

struct ClusterAssignment {
  std::vector<int> cluster;  // one id in [0, k) per instance
  ClusterConfig config;
  std::size_t clustered_directly = 0;  // size of the spectral subsample
  std::vector<std::string> warnings;
};

// Pairwise affinity: rbf = exp(-gamma ||x - y||^2) on unit-normalised rows,
// cosine = (1 + cos) / 2. Symmetric with unit diagonal.
Matrix affinity_matrix(const Matrix& points, Similarity measure, double gamma);

// Leading eigenvectors of D^-1/2 A D^-1/2 for one affinity setting. Built
// once and reused for every k up to max_k.
class SpectralEmbedding {
 public:
  SpectralEmbedding(const Matrix& points, const ClusterConfig& affinity, std::size_t max_k);

  std::size_t max_k() const { return basis_.cols(); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }  // descending
  const std::vector<std::size_t>& sample() const { return sample_; }

  // Ng-Jordan-Weiss assignment: first k eigenvector columns, rows scaled to
  // unit length, k-means. Points outside the subsample take the cluster of
  // their nearest subsampled neighbour.
  ClusterAssignment assign(std::size_t k, std::uint64_t seed, std::size_t restarts) const;

 private:
  ClusterConfig config_;
  Matrix unit_points_;
  std::vector<std::size_t> sample_;
  std::vector<int> nearest_sample_;  // per point: position in sample_
  Matrix basis_;
  std::vector<double> eigenvalues_;
};

ClusterAssignment cluster(const Matrix& points, const ClusterConfig& config);
ClusterAssignment cluster(std::span<const DiffVecInstance> instances, const ClusterConfig& config);

struct VMeasure {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v = 0.0;
};

// Maximum-likelihood entropies, natural log.
VMeasure v_measure(std::span<const int> gold, std::span<const int> pred);
VMeasure v_measure(std::span<const std::string> gold, std::span<const int> pred);

// Entropy of each relation's spread over clusters divided by ln(n_r); 0 for
// singleton relations.
std::map<std::string, double> relation_entropy(std::span<const std::string> gold, std::span<const int> pred);

struct TuneResult {
  ClusterConfig best;
  VMeasure best_score;
  std::vector<std::pair<ClusterConfig, VMeasure>> scores;  // grid order
};

// Highest V-measure on the dev instances; ties go to smaller k, then rbf
// before cosine, then smaller gamma.
TuneResult tune(std::span<const DiffVecInstance> dev, std::span<const ClusterConfig> grid);

// The standard grid: rbf with gamma in {0.25, 0.5, 1, 2, 4} plus cosine,
// crossed with every k.
std::vector<ClusterConfig> default_grid(std::span<const std::size_t> k_values, const ClusterConfig& base);

struct KScore {
  std::size_t k = 0;
  VMeasure score;
};

// One clustering per k on a shared spectral embedding.
std::vector<KScore> sweep_k(std::span<const DiffVecInstance> instances, std::span<const std::size_t> k_values,
                            const ClusterConfig& base);

// Derives the k-means seed used for a given k from the configuration seed.
std::uint64_t kmeans_seed(std::uint64_t seed, std::size_t k);

}  // namespace diffvec
