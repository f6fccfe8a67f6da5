#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "diffvec/error.hpp"
#include "diffvec/kernels.hpp"
#include "diffvec/kmeans.hpp"
#include "diffvec/matrix.hpp"
#include "diffvec/prng.hpp"
#include "diffvec/sym_eig.hpp"
#include "oracles/oracles.hpp"

using namespace diffvec;

namespace {

Matrix to_matrix(const oracle::Dense& d) { return Matrix::from_rows(d); }

double residual(const Matrix& a, const EigenDecomposition& e, std::size_t j) {
  const std::size_t n = a.rows();
  double r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double av = 0;
    for (std::size_t k = 0; k < n; ++k) av += a(i, k) * e.vectors(k, j);
    const double d = av - e.values[j] * e.vectors(i, j);
    r += d * d;
  }
  return std::sqrt(r);
}

double orthonormality_error(const Matrix& v) {
  const std::size_t n = v.rows();
  double worst = 0;
  for (std::size_t a = 0; a < v.cols(); ++a)
    for (std::size_t b = 0; b < v.cols(); ++b) {
      double d = 0;
      for (std::size_t i = 0; i < n; ++i) d += v(i, a) * v(i, b);
      worst = std::max(worst, std::abs(d - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

}  // namespace

TEST_CASE("prng streams are reproducible and split by tag") {
  Prng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    (void)c;
  }
  CHECK(Prng(42).next() != Prng(43).next());
  CHECK(Prng::split(7, "a").next() == Prng::split(7, "a").next());
  CHECK(Prng::split(7, "a").next() != Prng::split(7, "b").next());
  CHECK(Prng::split(7, std::uint64_t{1}).next() != Prng::split(7, std::uint64_t{2}).next());
}

TEST_CASE("prng below and uniform stay in range and are roughly uniform") {
  Prng rng(5);
  std::vector<int> hist(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const auto v = rng.below(6);
    REQUIRE(v < 6);
    ++hist[v];
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  double s = 0, s2 = 0;
  for (int i = 0; i < 50000; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / 50000) < 0.03);
  CHECK(std::abs(s2 / 50000 - 1.0) < 0.03);
}

TEST_CASE("prng shuffle is a permutation") {
  Prng rng(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  std::set<int> s(v.begin(), v.end());
  CHECK(s.size() == 50);
  CHECK(*s.begin() == 0);
  CHECK(*s.rbegin() == 49);
}

TEST_CASE("sym_eig of the identity") {
  const auto e = sym_eig(SymmetricMatrix(Matrix::identity(3)));
  REQUIRE(e.values.size() == 3);
  for (double v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(orthonormality_error(e.vectors) < 1e-12);
}

TEST_CASE("sym_eig of a 2x2 matrix matches the characteristic polynomial") {
  const auto e = sym_eig(SymmetricMatrix(Matrix::from_rows({{2, 1}, {1, 2}})));
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-14));
  const double r = 1 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(e.vectors(0, 0)) - r) < 1e-12);
  CHECK(std::abs(e.vectors(0, 0) + e.vectors(1, 0)) < 1e-12);  // proportional to (1, -1)
  CHECK(std::abs(e.vectors(0, 1) - e.vectors(1, 1)) < 1e-12);  // proportional to (1, 1)
}

TEST_CASE("sym_eig trace and determinant oracles on a random 10x10 matrix") {
  std::mt19937_64 rng(11);
  const auto d = oracle::random_symmetric(rng, 10);
  const auto e = sym_eig(SymmetricMatrix(to_matrix(d)));
  double trace = 0, sum = 0, prod = 1;
  for (std::size_t i = 0; i < 10; ++i) trace += d[i][i];
  for (double v : e.values) {
    sum += v;
    prod *= v;
  }
  CHECK(std::abs(trace - sum) < 1e-8);
  const double det = oracle::determinant(d);
  CHECK(std::abs(prod - det) <= 1e-6 * std::abs(det));
}

TEST_CASE("sym_eig rejects asymmetric and non-finite input") {
  CHECK_THROWS_AS(SymmetricMatrix(Matrix::from_rows({{1, 2}, {2.1, 1}})), Error);
  CHECK_THROWS_AS(SymmetricMatrix(Matrix::from_rows({{1, NAN}, {NAN, 1}})), Error);
  CHECK_THROWS_AS(SymmetricMatrix(Matrix(2, 3)), Error);
  CHECK_NOTHROW(SymmetricMatrix(Matrix::from_rows({{1, 2}, {2 + 1e-13, 1}})));
}

TEST_CASE("sym_eig handles degenerate spectra and the empty matrix") {
  Matrix z(4, 4, 0.0);
  const auto e0 = sym_eig(SymmetricMatrix(z));
  for (double v : e0.values) CHECK(v == 0.0);
  CHECK(orthonormality_error(e0.vectors) < 1e-12);
  Matrix ones(5, 5, 1.0);
  const auto e1 = sym_eig(SymmetricMatrix(ones));
  CHECK(e1.values.back() == doctest::Approx(5.0));
  for (std::size_t j = 0; j < 5; ++j) CHECK(residual(ones, e1, j) < 1e-12);
  CHECK(sym_eig(SymmetricMatrix(Matrix())).values.empty());
}

TEST_CASE("property: sym_eig residual and orthonormality on random matrices") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> order(1, 64);
  std::uniform_real_distribution<double> scale_exp(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = order(rng);
    auto d = oracle::random_symmetric(rng, n);
    const double scale = std::pow(10.0, scale_exp(rng));
    for (auto& row : d)
      for (auto& x : row) x *= scale;
    // Plant repeated eigenvalues now and then.
    if (trial % 5 == 0)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = (i == j) ? scale * double(i % 3) : 0.0;
    const Matrix a = to_matrix(d);
    const auto e = sym_eig(SymmetricMatrix(a));
    const double fro = std::max(frobenius_norm(a), 1e-300);
    for (std::size_t j = 0; j < n; ++j) REQUIRE(residual(a, e, j) <= 1e-8 * fro);
    REQUIRE(orthonormality_error(e.vectors) <= 1e-8);
    REQUIRE(std::is_sorted(e.values.begin(), e.values.end()));
  }
}

TEST_CASE("kmeans separates two distant clouds") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0, 0.1);
  std::vector<std::vector<double>> rows;
  std::vector<int> truth;
  for (int i = 0; i < 40; ++i) {
    const double cx = i < 20 ? 0 : 100;
    rows.push_back({cx + nd(rng), nd(rng)});
    truth.push_back(i < 20 ? 0 : 1);
  }
  KMeansOptions o;
  o.k = 2;
  o.seed = 1;
  const auto r = kmeans(Matrix::from_rows(rows), o);
  for (int i = 0; i < 40; ++i) CHECK((r.assignment[i] == r.assignment[0]) == (truth[i] == truth[0]));
}

TEST_CASE("kmeans with k equal to the point count has zero inertia") {
  const auto pts = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}, {5, 5}});
  KMeansOptions o;
  o.k = 4;
  const auto r = kmeans(pts, o);
  CHECK(r.inertia == 0.0);
  CHECK(std::set<int>(r.assignment.begin(), r.assignment.end()).size() == 4);
}

TEST_CASE("kmeans inertia is non-increasing over Lloyd iterations and reproducible") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> rows(300, std::vector<double>(5));
  for (auto& r : rows)
    for (auto& x : r) x = nd(rng);
  KMeansOptions o;
  o.k = 7;
  o.seed = 99;
  const auto pts = Matrix::from_rows(rows);
  const auto r = kmeans(pts, o);
  for (std::size_t i = 1; i < r.inertia_trace.size(); ++i)
    CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] * (1 + 1e-12));
  const auto r2 = kmeans(pts, o);
  CHECK(r.assignment == r2.assignment);
  CHECK(r.inertia == r2.inertia);
  CHECK(r.centroids == r2.centroids);
}

TEST_CASE("kmeans rejects k larger than the point count") {
  KMeansOptions o;
  o.k = 3;
  CHECK_THROWS_AS(kmeans(Matrix::from_rows({{0.0}, {1.0}}), o), Error);
}

TEST_CASE("kernels") {
  const std::vector<double> x{0.3, -1.2, 2.0}, y{1.0, 0.5, -0.25};
  CHECK(kernel_rbf(x, x, 3.7) == 1.0);
  CHECK(kernel_rbf(std::vector<double>{0, 0}, std::vector<double>{1, 0}, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(kernel_rbf(x, y, 0.4) == kernel_rbf(y, x, 0.4));
  CHECK(kernel_cosine(x, y) == kernel_cosine(y, x));
  CHECK(kernel_cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine_affinity(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.5);
  CHECK_THROWS_AS(kernel_cosine(std::vector<double>{0, 0}, std::vector<double>{0, 1}), Error);
  CHECK_THROWS_AS(kernel_rbf(x, y, 0.0), Error);
  CHECK_THROWS_AS(kernel_rbf(x, std::vector<double>{1.0}, 1.0), Error);
}

TEST_CASE("property: rbf kernel is invariant under joint rescaling of inputs and gamma") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(6), y(6);
    for (auto& v : x) v = nd(rng);
    for (auto& v : y) v = nd(rng);
    const double a = std::ldexp(1.0, int(t % 9) - 4);  // powers of two scale exactly
    std::vector<double> ax(x), ay(y);
    for (auto& v : ax) v *= a;
    for (auto& v : ay) v *= a;
    CHECK(kernel_rbf(ax, ay, 0.7 / (a * a)) == kernel_rbf(x, y, 0.7));
  }
}
