#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// One-sided Jacobi SVD of an m x n matrix (m >= n): A = U diag(s) V^T with
// singular values sorted descending.
struct Svd {
  Dense u;  // m x n
  std::vector<double> s;
  Dense v;  // n x n
};

inline Svd jacobi_svd(Dense a) {
  const std::size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
  Dense v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a[i][p] * a[i][p];
          beta += a[i][q] * a[i][q];
          gamma += a[i][p] * a[i][q];
        }
        if (std::abs(gamma) <= 1e-300) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
        const double c = 1 / std::sqrt(1 + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = a[i][p], y = a[i][q];
          a[i][p] = c * x - s * y;
          a[i][q] = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double x = v[i][p], y = v[i][q];
          v[i][p] = c * x - s * y;
          v[i][q] = s * x + c * y;
        }
      }
    if (off < 1e-15) break;
  }
  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) {
    double t = 0;
    for (std::size_t i = 0; i < m; ++i) t += a[i][j] * a[i][j];
    s[j] = std::sqrt(t);
  }
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return s[x] > s[y]; });
  Svd out;
  out.u.assign(m, std::vector<double>(n, 0.0));
  out.v.assign(n, std::vector<double>(n, 0.0));
  out.s.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.s[k] = s[j];
    for (std::size_t i = 0; i < m; ++i) out.u[i][k] = s[j] > 0 ? a[i][j] / s[j] : 0.0;
    for (std::size_t i = 0; i < n; ++i) out.v[i][k] = v[i][j];
  }
  return out;
}

// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(Dense a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// Co-occurrence counts by enumerating every ordered pair of positions.
inline std::map<std::pair<std::string, std::string>, std::uint64_t> brute_cooccurrence(
    const std::vector<std::vector<std::string>>& segments, std::size_t window) {
  std::map<std::pair<std::string, std::string>, std::uint64_t> out;
  for (const auto& seg : segments)
    for (std::size_t i = 0; i < seg.size(); ++i)
      for (std::size_t j = 0; j < seg.size(); ++j) {
        const std::size_t d = i > j ? i - j : j - i;
        if (d >= 1 && d <= window) ++out[{seg[i], seg[j]}];
      }
  return out;
}

// Relative recall straight from its definition.
inline std::map<std::string, double> relative_recall(
    const std::map<std::string, std::set<std::pair<std::string, std::string>>>& found,
    const std::set<std::pair<std::string, std::string>>& correct) {
  std::set<std::pair<std::string, std::string>> all;
  for (const auto& [m, s] : found) all.insert(s.begin(), s.end());
  std::set<std::pair<std::string, std::string>> pool;
  std::set_intersection(all.begin(), all.end(), correct.begin(), correct.end(), std::inserter(pool, pool.begin()));
  std::map<std::string, double> out;
  for (const auto& [m, s] : found) {
    std::set<std::pair<std::string, std::string>> hit;
    std::set_intersection(s.begin(), s.end(), correct.begin(), correct.end(), std::inserter(hit, hit.begin()));
    out[m] = pool.empty() ? 1.0 : double(hit.size()) / double(pool.size());
  }
  return out;
}

// Hard-margin SVM on two points: w = 2 (x+ - x-) / ||x+ - x-||^2 and the
// boundary passes through the midpoint.
struct TwoPointSvm {
  std::vector<double> w;
  double b;
};

inline TwoPointSvm two_point_svm(const std::vector<double>& pos, const std::vector<double>& neg) {
  std::vector<double> d(pos.size());
  double nn = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = pos[i] - neg[i];
    nn += d[i] * d[i];
  }
  TwoPointSvm out;
  out.w.resize(d.size());
  double mid = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.w[i] = 2 * d[i] / nn;
    mid += out.w[i] * 0.5 * (pos[i] + neg[i]);
  }
  out.b = -mid;
  return out;
}

inline Dense random_symmetric(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  Dense a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a[i][j] = a[j][i] = nd(rng);
  return a;
}

}  // namespace oracle
