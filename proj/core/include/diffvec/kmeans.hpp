#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "diffvec/matrix.hpp"

namespace diffvec {

struct KMeansOptions {
  std::size_t k = 2;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> assignment;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::size_t best_restart = 0;
  // Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_trace;
};

// k-means++ seeding, Lloyd iterations to an assignment fixpoint, best of
// `restarts` by (inertia, restart index). A cluster that empties during
// iteration is re-seeded at the point farthest from its current centroid.
KMeansResult kmeans(const Matrix& points, const KMeansOptions& options);

}  // namespace diffvec
