#include "diffvec/sym_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "diffvec/error.hpp"

namespace diffvec {

SymmetricMatrix::SymmetricMatrix(Matrix values) : values_(std::move(values)) {
  const std::size_t n = values_.rows();
  if (values_.cols() != n) throw Error("SymmetricMatrix: matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double a = values_(i, j);
      const double b = values_(j, i);
      if (!std::isfinite(a) || !std::isfinite(b)) throw Error("SymmetricMatrix: non-finite entry");
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw Error("SymmetricMatrix: asymmetry at (" + std::to_string(i) + "," +
                    std::to_string(j) + ")");
    }
  }
}

namespace {

// Both routines follow the EISPACK tred2/tql2 pair. The working matrix is kept
// transposed (w[j*n + k] holds element (k, j)) so the column sweeps of the
// original formulation walk contiguous memory, and after tql2 row i of the
// working storage is eigenvector i.
class Workspace {
 public:
  explicit Workspace(std::size_t n) : n_(n), w_(n * n) {}
  double& at(std::size_t k, std::size_t j) { return w_[j * n_ + k]; }
  double* column(std::size_t j) { return w_.data() + j * n_; }
  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> w_;
};

void tridiagonalize(Workspace& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.n();
  for (std::size_t j = 0; j < n; ++j) d[j] = v.at(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v.at(i - 1, j);
        v.at(i, j) = 0.0;
        v.at(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v.at(j, i) = f;
        double* col = v.column(j);
        g = e[j] + col[j] * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += col[k] * d[k];
          e[k] += col[k] * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        double* col = v.column(j);
        for (std::size_t k = j; k < i; ++k) col[k] -= (f * e[k] + g * d[k]);
        d[j] = col[i - 1];
        col[i] = 0.0;
      }
    }
    d[i] = h;
  }

  // Accumulate the Householder reflections.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v.at(n - 1, i) = v.at(i, i);
    v.at(i, i) = 1.0;
    const double h = d[i + 1];
    double* next = v.column(i + 1);
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = next[k] / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double* col = v.column(j);
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += next[k] * col[k];
        for (std::size_t k = 0; k <= i; ++k) col[k] -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) next[k] = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v.at(n - 1, j);
    v.at(n - 1, j) = 0.0;
  }
  v.at(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

void implicit_ql(Workspace& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.n();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_sweeps = 64;
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int sweeps = 0;
      do {
        if (++sweeps > max_sweeps) throw Error("sym_eig: QL iteration failed to converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          double* vi = v.column(i);
          double* vi1 = v.column(i + 1);
          for (std::size_t k = 0; k < n; ++k) {
            const double t = vi1[k];
            vi1[k] = s * vi[k] + c * t;
            vi[k] = c * vi[k] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

EigenDecomposition sym_eig(const SymmetricMatrix& a) {
  const std::size_t n = a.order();
  EigenDecomposition out;
  if (n == 0) return out;

  Workspace v(n);
  // Symmetric input: storing A transposed is storing A.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v.at(i, j) = 0.5 * (a(i, j) + a(j, i));

  std::vector<double> d(n), e(n);
  tridiagonalize(v, d, e);
  implicit_ql(v, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    const double* vec = v.column(order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = vec[k];
  }
  return out;
}

}  // namespace diffvec
