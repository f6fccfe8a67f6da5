#include "diffvec/kmeans.hpp"

#include <limits>

#include "diffvec/error.hpp"
#include "diffvec/prng.hpp"

namespace diffvec {
namespace {

// k-means++: first centre uniform, later centres with probability
// proportional to squared distance to the nearest chosen centre.
Matrix seed_centroids(const Matrix& points, std::size_t k, Prng& rng) {
  const std::size_t n = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);

  auto take = [&](std::size_t c, std::size_t idx) {
    chosen[idx] = true;
    auto src = points.row(idx);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], squared_distance(points.row(i), src));
  };

  take(0, static_cast<std::size_t>(rng.below(n)));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = n;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        pick = i;
        target -= nearest[i];
        if (target < 0.0) break;
      }
    } else {
      // Fewer distinct points than k: fall back to the first unused point.
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    take(c, pick);
  }
  return centroids;
}

struct Run {
  std::vector<int> assignment;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

double assign(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment,
              std::vector<double>& cost) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(points.row(i), centroids.row(c));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    assignment[i] = best;
    cost[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

void update_centroids(const Matrix& points, std::vector<int>& assignment, std::vector<double>& cost,
                      Matrix& centroids) {
  const std::size_t k = centroids.rows();
  const std::size_t dim = points.cols();
  std::vector<std::size_t> counts(k, 0);
  for (int a : assignment) ++counts[static_cast<std::size_t>(a)];

  // Empty clusters take the currently worst-served point.
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (counts[static_cast<std::size_t>(assignment[i])] > 1 && cost[i] > far_d) {
        far_d = cost[i];
        far = i;
      }
    }
    --counts[static_cast<std::size_t>(assignment[far])];
    assignment[far] = static_cast<int>(c);
    cost[far] = 0.0;
    counts[c] = 1;
  }

  centroids = Matrix(k, dim);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto dst = centroids.row(static_cast<std::size_t>(assignment[i]));
    auto src = points.row(i);
    for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (double& x : centroids.row(c)) x *= inv;
  }
}

double inertia_of(const Matrix& points, const Matrix& centroids, const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    total += squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(assignment[i])));
  return total;
}

Run lloyd(const Matrix& points, std::size_t k, std::size_t max_iterations, Prng& rng) {
  Run run;
  run.centroids = seed_centroids(points, k, rng);
  run.assignment.assign(points.rows(), -1);
  std::vector<int> next(points.rows());
  std::vector<double> cost(points.rows());

  for (std::size_t it = 0; it < max_iterations; ++it) {
    const double inertia = assign(points, run.centroids, next, cost);
    run.trace.push_back(inertia);
    run.iterations = it + 1;
    const bool converged = next == run.assignment;
    run.assignment = next;
    if (converged) break;
    update_centroids(points, run.assignment, cost, run.centroids);
  }
  run.inertia = inertia_of(points, run.centroids, run.assignment);
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, const KMeansOptions& options) {
  if (options.k == 0) throw Error("kmeans: k must be positive");
  if (options.k > points.rows()) throw Error("kmeans: k exceeds number of points");
  if (options.restarts == 0) throw Error("kmeans: restarts must be positive");

  KMeansResult best;
  bool have_best = false;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    Prng rng = Prng::split(options.seed, r);
    Run run = lloyd(points, options.k, options.max_iterations, rng);
    if (!have_best || run.inertia < best.inertia) {
      best.assignment = std::move(run.assignment);
      best.centroids = std::move(run.centroids);
      best.inertia = run.inertia;
      best.iterations = run.iterations;
      best.inertia_trace = std::move(run.trace);
      best.best_restart = r;
      have_best = true;
    }
  }
  return best;
}

}  // namespace diffvec
