#include "diffvec/spectral_clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "diffvec/error.hpp"
#include "diffvec/kernels.hpp"
#include "diffvec/kmeans.hpp"
#include "diffvec/prng.hpp"
#include "diffvec/sym_eig.hpp"

namespace diffvec {

std::string_view to_string(Similarity s) { return s == Similarity::rbf ? "rbf" : "cosine"; }

Similarity parse_similarity(std::string_view name) {
  if (name == "rbf") return Similarity::rbf;
  if (name == "cosine") return Similarity::cosine;
  throw Error("unknown similarity measure '" + std::string(name) + "' (expected rbf or cosine)");
}

void ClusterConfig::validate() const {
  if (k < 2) throw Error("ClusterConfig: k must be at least 2");
  if (!(gamma > 0.0)) throw Error("ClusterConfig: gamma must be positive");
  if (subsample_cap < k) throw Error("ClusterConfig: subsample_cap must be at least k");
  if (restarts == 0) throw Error("ClusterConfig: restarts must be positive");
}

std::uint64_t kmeans_seed(std::uint64_t seed, std::size_t k) { return Prng::split(seed, static_cast<std::uint64_t>(k)).next(); }

namespace {

Matrix unit_rows(const Matrix& points) {
  Matrix out = points;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    const double n = l2_norm(row);
    if (n > 0.0)
      for (double& x : row) x /= n;
  }
  return out;
}

Matrix affinity_of_unit_rows(const Matrix& unit, Similarity measure, double gamma) {
  const std::size_t n = unit.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double value = measure == Similarity::rbf ? kernel_rbf(unit.row(i), unit.row(j), gamma)
                                                      : std::clamp(0.5 * (1.0 + dot(unit.row(i), unit.row(j))), 0.0, 1.0);
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  return a;
}

void require_nonzero_rows(const Matrix& points) {
  for (std::size_t i = 0; i < points.rows(); ++i)
    if (l2_norm(points.row(i)) == 0.0)
      throw Error("cosine affinity: zero vector at instance " + std::to_string(i));
}

}  // namespace

Matrix affinity_matrix(const Matrix& points, Similarity measure, double gamma) {
  if (measure == Similarity::cosine) require_nonzero_rows(points);
  if (measure == Similarity::rbf && !(gamma > 0.0)) throw Error("affinity_matrix: gamma must be positive");
  return affinity_of_unit_rows(unit_rows(points), measure, gamma);
}

SpectralEmbedding::SpectralEmbedding(const Matrix& points, const ClusterConfig& affinity, std::size_t max_k)
    : config_(affinity) {
  if (!(affinity.gamma > 0.0)) throw Error("SpectralEmbedding: gamma must be positive");
  const std::size_t n = points.rows();
  if (max_k == 0 || max_k > n) throw Error("SpectralEmbedding: need at least max_k instances");
  if (affinity.subsample_cap < max_k) throw Error("SpectralEmbedding: subsample_cap must be at least k");
  if (affinity.measure == Similarity::cosine) require_nonzero_rows(points);

  unit_points_ = unit_rows(points);
  sample_.resize(n);
  std::iota(sample_.begin(), sample_.end(), 0);
  if (n > affinity.subsample_cap) {
    Prng rng = Prng::split(affinity.seed, "subsample");
    rng.shuffle(std::span(sample_));
    sample_.resize(affinity.subsample_cap);
    std::sort(sample_.begin(), sample_.end());
  }

  const Matrix sampled = unit_points_.select_rows(sample_);
  const std::size_t s = sampled.rows();
  Matrix a = affinity_of_unit_rows(sampled, affinity.measure, affinity.gamma);

  std::vector<double> inv_sqrt_degree(s);
  for (std::size_t i = 0; i < s; ++i) {
    double degree = 0.0;
    for (double x : a.row(i)) degree += x;
    // Self-affinity is 1, so degrees are at least 1.
    if (!(degree > 0.0)) throw Error("SpectralEmbedding: zero-degree node");
    inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);
  }
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) a(i, j) *= inv_sqrt_degree[i] * inv_sqrt_degree[j];

  const EigenDecomposition eig = sym_eig(SymmetricMatrix(std::move(a)));
  basis_ = Matrix(s, max_k);
  for (std::size_t c = 0; c < max_k; ++c) {
    const std::size_t src = s - 1 - c;
    eigenvalues_.push_back(eig.values[src]);
    for (std::size_t i = 0; i < s; ++i) basis_(i, c) = eig.vectors(i, src);
  }

  // Out-of-sample points map to their nearest sampled neighbour.
  nearest_sample_.assign(n, -1);
  for (std::size_t p = 0; p < s; ++p) nearest_sample_[sample_[p]] = static_cast<int>(p);
  if (s < n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest_sample_[i] >= 0) continue;
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t p = 0; p < s; ++p) {
        const double d = squared_distance(unit_points_.row(i), unit_points_.row(sample_[p]));
        if (d < best) {
          best = d;
          arg = static_cast<int>(p);
        }
      }
      nearest_sample_[i] = arg;
    }
  }
}

ClusterAssignment SpectralEmbedding::assign(std::size_t k, std::uint64_t seed, std::size_t restarts) const {
  if (k < 2 || k > max_k()) throw Error("SpectralEmbedding::assign: k outside [2, max_k]");
  const std::size_t s = basis_.rows();
  Matrix rows(s, k);
  for (std::size_t i = 0; i < s; ++i) {
    double norm = 0.0;
    for (std::size_t c = 0; c < k; ++c) norm += basis_(i, c) * basis_(i, c);
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < k; ++c) rows(i, c) = norm > 0.0 ? basis_(i, c) / norm : 0.0;
  }
  KMeansOptions opts;
  opts.k = k;
  opts.restarts = restarts;
  opts.seed = kmeans_seed(seed, k);
  const KMeansResult km = kmeans(rows, opts);

  ClusterAssignment out;
  out.config = config_;
  out.config.k = k;
  out.config.seed = seed;
  out.config.restarts = restarts;
  out.clustered_directly = s;
  out.cluster.resize(nearest_sample_.size());
  for (std::size_t i = 0; i < nearest_sample_.size(); ++i)
    out.cluster[i] = km.assignment[static_cast<std::size_t>(nearest_sample_[i])];
  if (s < nearest_sample_.size())
    out.warnings.push_back("clustered a subsample of " + std::to_string(s) + " of " +
                           std::to_string(nearest_sample_.size()) + " instances; the rest follow their nearest neighbour");
  return out;
}

ClusterAssignment cluster(const Matrix& points, const ClusterConfig& config) {
  config.validate();
  if (points.rows() < config.k) throw Error("cluster: fewer instances than clusters");
  SpectralEmbedding emb(points, config, config.k);
  return emb.assign(config.k, config.seed, config.restarts);
}

ClusterAssignment cluster(std::span<const DiffVecInstance> instances, const ClusterConfig& config) {
  return cluster(to_matrix(instances), config);
}

namespace {

std::vector<int> encode(std::span<const std::string> labels) {
  std::map<std::string, int> ids;
  for (const auto& l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [l, id] : ids) id = next++;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(ids[l]);
  return out;
}

// sum over classes of (n/N) log(N/n)
double entropy(const std::map<int, std::size_t>& counts, double total) {
  double h = 0.0;
  for (const auto& [id, n] : counts) {
    const double nd = static_cast<double>(n);
    h += (nd / total) * std::log(total / nd);
  }
  return h;
}

}  // namespace

VMeasure v_measure(std::span<const int> gold, std::span<const int> pred) {
  if (gold.size() != pred.size()) throw Error("v_measure: label and cluster sequences differ in length");
  if (gold.empty()) throw Error("v_measure: empty input");
  const double total = static_cast<double>(gold.size());

  std::map<int, std::size_t> g_count, p_count;
  std::map<std::pair<int, int>, std::size_t> gp, pg;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++g_count[gold[i]];
    ++p_count[pred[i]];
    ++gp[{gold[i], pred[i]}];
    ++pg[{pred[i], gold[i]}];
  }
  const double h_gold = entropy(g_count, total);
  const double h_pred = entropy(p_count, total);

  // Mutual information, summed in the order matching each marginal entropy so
  // identical partitions give exactly I = H.
  auto mutual_information = [&](const std::map<std::pair<int, int>, std::size_t>& cells,
                                const std::map<int, std::size_t>& first, const std::map<int, std::size_t>& second) {
    double mi = 0.0;
    for (const auto& [key, n] : cells) {
      const double nd = static_cast<double>(n);
      const double a = static_cast<double>(first.at(key.first));
      const double b = static_cast<double>(second.at(key.second));
      mi += (nd / total) * std::log((total * nd) / (a * b));
    }
    return mi;
  };

  VMeasure out;
  out.homogeneity = h_gold == 0.0 ? 1.0 : std::clamp(mutual_information(gp, g_count, p_count) / h_gold, 0.0, 1.0);
  out.completeness = h_pred == 0.0 ? 1.0 : std::clamp(mutual_information(pg, p_count, g_count) / h_pred, 0.0, 1.0);
  const double sum = out.homogeneity + out.completeness;
  out.v = sum == 0.0 ? 0.0 : 2.0 * out.homogeneity * out.completeness / sum;
  return out;
}

VMeasure v_measure(std::span<const std::string> gold, std::span<const int> pred) {
  const auto ids = encode(gold);
  return v_measure(std::span<const int>(ids), pred);
}

std::map<std::string, double> relation_entropy(std::span<const std::string> gold, std::span<const int> pred) {
  if (gold.size() != pred.size()) throw Error("relation_entropy: length mismatch");
  std::map<std::string, std::map<int, std::size_t>> spread;
  for (std::size_t i = 0; i < gold.size(); ++i) ++spread[gold[i]][pred[i]];
  std::map<std::string, double> out;
  for (const auto& [relation, clusters] : spread) {
    std::size_t n = 0;
    for (const auto& [c, m] : clusters) n += m;
    if (n <= 1) {
      out[relation] = 0.0;
      continue;
    }
    const double h = entropy(clusters, static_cast<double>(n));
    out[relation] = std::clamp(h / std::log(static_cast<double>(n)), 0.0, 1.0);
  }
  return out;
}

namespace {

bool better(const ClusterConfig& a, const VMeasure& sa, const ClusterConfig& b, const VMeasure& sb) {
  if (sa.v != sb.v) return sa.v > sb.v;
  if (a.k != b.k) return a.k < b.k;
  if (a.measure != b.measure) return a.measure == Similarity::rbf;
  return a.gamma < b.gamma;
}

using AffinityKey = std::tuple<int, double, std::size_t, std::uint64_t>;

AffinityKey affinity_key(const ClusterConfig& c) {
  // gamma is irrelevant to the cosine affinity
  return {static_cast<int>(c.measure), c.measure == Similarity::rbf ? c.gamma : 0.0, c.subsample_cap, c.seed};
}

}  // namespace

TuneResult tune(std::span<const DiffVecInstance> dev, std::span<const ClusterConfig> grid) {
  if (grid.empty()) throw Error("tune: empty grid");
  for (const auto& c : grid) c.validate();
  const Matrix points = to_matrix(dev);

  std::map<AffinityKey, std::size_t> max_k;
  for (const auto& c : grid) {
    auto& m = max_k[affinity_key(c)];
    m = std::max(m, c.k);
  }
  std::map<AffinityKey, SpectralEmbedding> embeddings;
  const auto labels = labels_of(dev);
  TuneResult result;
  for (const auto& c : grid) {
    const AffinityKey key = affinity_key(c);
    auto it = embeddings.find(key);
    if (it == embeddings.end()) it = embeddings.emplace(key, SpectralEmbedding(points, c, max_k[key])).first;
    const ClusterAssignment a = it->second.assign(c.k, c.seed, c.restarts);
    const VMeasure score = v_measure(std::span<const std::string>(labels), std::span<const int>(a.cluster));
    result.scores.emplace_back(c, score);
    if (result.scores.size() == 1 || better(c, score, result.best, result.best_score)) {
      result.best = c;
      result.best_score = score;
    }
  }
  return result;
}

std::vector<ClusterConfig> default_grid(std::span<const std::size_t> k_values, const ClusterConfig& base) {
  std::vector<ClusterConfig> grid;
  for (std::size_t k : k_values) {
    for (double gamma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      ClusterConfig c = base;
      c.k = k;
      c.measure = Similarity::rbf;
      c.gamma = gamma;
      grid.push_back(c);
    }
    ClusterConfig c = base;
    c.k = k;
    c.measure = Similarity::cosine;
    grid.push_back(c);
  }
  return grid;
}

std::vector<KScore> sweep_k(std::span<const DiffVecInstance> instances, std::span<const std::size_t> k_values,
                            const ClusterConfig& base) {
  if (k_values.empty()) return {};
  const std::size_t max_k = *std::max_element(k_values.begin(), k_values.end());
  for (std::size_t k : k_values) {
    ClusterConfig c = base;
    c.k = k;
    c.validate();
  }
  const SpectralEmbedding emb(to_matrix(instances), base, max_k);
  const auto labels = labels_of(instances);
  std::vector<KScore> out;
  for (std::size_t k : k_values) {
    const ClusterAssignment a = emb.assign(k, base.seed, base.restarts);
    out.push_back({k, v_measure(std::span<const std::string>(labels), std::span<const int>(a.cluster))});
  }
  return out;
}

}  // namespace diffvec
