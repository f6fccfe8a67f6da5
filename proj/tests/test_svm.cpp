#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>

#include "diffvec/cross_validation.hpp"
#include "diffvec/error.hpp"
#include "diffvec/kernels.hpp"
#include "diffvec/svm.hpp"
#include "oracles/oracles.hpp"

using namespace diffvec;

namespace {

Matrix gaussian(std::mt19937_64& rng, std::size_t n, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = nd(rng);
  return m;
}

// Two shifted Gaussian blobs with labels +1 then -1.
std::pair<Matrix, std::vector<int>> blobs(std::mt19937_64& rng, std::size_t n, std::size_t d, double shift) {
  Matrix x = gaussian(rng, n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i < n / 2 ? 1 : -1;
    x(i, 0) += y[i] * shift;
  }
  return {x, y};
}

Matrix permuted(const Matrix& x, const std::vector<std::size_t>& perm) { return x.select_rows(perm); }

}  // namespace

TEST_CASE("one-dimensional symmetric problem puts the boundary at zero") {
  const auto x = Matrix::from_rows({{-1}, {1}});
  const std::vector<std::string> y{"A", "B"};
  LinearSvmOptions o;
  o.C = 1000;
  const auto m = train_linear_multiclass(x, y, o);
  CHECK(m.classes() == std::vector<std::string>{"A", "B"});
  CHECK(m.predict(x) == y);
  CHECK(m.predict(std::vector<double>{-0.01}) == "A");
  CHECK(m.predict(std::vector<double>{0.01}) == "B");
  const auto sa = m.scores(std::vector<double>{0.0});
  CHECK(std::abs(sa[0] - sa[1]) < 1e-3);
}

TEST_CASE("two-point linear SVM matches the closed form") {
  const auto x = Matrix::from_rows({{2, 0}, {-2, 0}});
  const std::vector<int> y{1, -1};
  LinearSvmOptions o;
  o.tolerance = 1e-8;
  const auto b = train_binary_linear(x, y, o);
  const auto ref = oracle::two_point_svm({2, 0}, {-2, 0});
  CHECK(std::abs(b.w[0] - ref.w[0]) < 1e-3);
  CHECK(std::abs(b.w[1] - ref.w[1]) < 1e-3);
  CHECK(std::abs(b.bias - ref.b) < 1e-3);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p{nd(rng), nd(rng), nd(rng)};
    std::vector<double> q{-p[0], -p[1], -p[2]};
    const auto r = oracle::two_point_svm(p, q);
    o.C = 1e3;
    const auto fit = train_binary_linear(Matrix::from_rows({p, q}), y, o);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fit.w[j] - r.w[j]) < 1e-3);
    CHECK(std::abs(fit.bias - r.b) < 1e-3);
  }
}

TEST_CASE("linear training separates separable data and is deterministic") {
  std::mt19937_64 rng(10);
  Matrix x = gaussian(rng, 90, 4, 0.3);
  std::vector<std::string> y(90);
  for (std::size_t i = 0; i < 90; ++i) {
    y[i] = i % 3 == 0 ? "c" : i % 3 == 1 ? "a" : "b";
    x(i, i % 3) += 5.0;
  }
  LinearSvmOptions o;
  o.seed = 3;
  std::vector<LinearTrace> traces;
  const auto m = train_linear_multiclass(x, y, o, &traces);
  CHECK(m.classes() == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.predict(x) == y);
  REQUIRE(traces.size() == 3);
  for (const auto& t : traces) {
    CHECK(t.converged);
    for (std::size_t e = 1; e < t.dual_objective.size(); ++e)
      CHECK(t.dual_objective[e] <= t.dual_objective[e - 1] + 1e-12);
  }
  const auto again = train_linear_multiclass(x, y, o);
  CHECK(again.weights() == m.weights());
  CHECK(again.bias() == m.bias());
}

TEST_CASE("property: linear dual objective is non-increasing and alphas stay in the box") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto [x, y] = blobs(rng, 20 + rng() % 40, 1 + rng() % 5, 0.5);
    LinearSvmOptions o;
    o.C = std::pow(10.0, double(rng() % 5) - 2.0);
    o.seed = rng();
    LinearTrace t;
    const auto b = train_binary_linear(x, y, o, &t);
    CHECK_FALSE(t.dual_objective.empty());
    for (std::size_t e = 1; e < t.dual_objective.size(); ++e)
      CHECK(t.dual_objective[e] <= t.dual_objective[e - 1] + 1e-12);
    for (double a : b.alpha) {
      CHECK(a >= 0.0);
      CHECK(a <= o.C);
    }
    // Weak duality: primal >= -dual at every epoch.
    for (std::size_t e = 0; e < t.dual_objective.size(); ++e)
      CHECK(t.primal_objective[e] + t.dual_objective[e] >= -1e-9 * std::max(1.0, t.primal_objective[e]));
  }
}

TEST_CASE("linear training errors") {
  const auto x = Matrix::from_rows({{0}, {1}});
  const std::vector<std::string> one{"A", "A"};
  CHECK_THROWS_AS(train_linear_multiclass(x, one, {}), Error);
  const std::vector<std::string> two{"A", "B"};
  LinearSvmOptions bad;
  bad.C = 0;
  CHECK_THROWS_AS(train_linear_multiclass(x, two, bad), Error);
  CHECK_THROWS_AS(train_binary_linear(x, std::vector<int>{1, 0}, {}), Error);
  const auto nan = Matrix::from_rows({{std::nan("")}, {1}});
  CHECK_THROWS_AS(train_linear_multiclass(nan, two, {}), Error);
  const auto m = train_linear_multiclass(x, two, {});
  CHECK_THROWS_AS(m.scores(std::vector<double>{1, 2}), Error);
}

TEST_CASE("RBF SVM separates XOR") {
  const auto x = Matrix::from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<int> y{-1, -1, 1, 1};
  KernelSvmOptions o;
  o.gamma = 1;
  o.C = 10;
  const auto m = train_binary_rbf(x, y, o);
  for (std::size_t i = 0; i < 4; ++i) CHECK(m.predict(x.row(i)) == y[i]);
  CHECK(m.converged);
}

TEST_CASE("two-point RBF SVM has unit functional margin") {
  const auto x = Matrix::from_rows({{0.5, 0}, {-0.5, 0}});
  const std::vector<int> y{1, -1};
  KernelSvmOptions o;
  o.gamma = 1.0;
  o.C = 100;
  o.tolerance = 1e-6;
  const auto m = train_binary_rbf(x, y, o);
  const double k = std::exp(-1.0);
  CHECK(std::abs(m.decision(x.row(0)) - 1.0) < 1e-3);
  CHECK(std::abs(m.decision(x.row(1)) + 1.0) < 1e-3);
  CHECK(std::abs(m.bias()) < 1e-3);
  for (double c : m.coef()) CHECK(std::abs(std::abs(c) - 1.0 / (1.0 - k)) < 1e-3);
}

TEST_CASE("property: RBF duals satisfy box and equality constraints") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    auto [x, y] = blobs(rng, 10 + rng() % 50, 1 + rng() % 6, 0.3 + double(rng() % 10) / 10.0);
    KernelSvmOptions o;
    o.C = std::pow(10.0, double(rng() % 4) - 1.0);
    o.gamma = trial % 3 == 0 ? 0.0 : 0.1 + double(rng() % 20) / 10.0;
    const auto m = train_binary_rbf(x, y, o);
    CHECK(m.converged);
    double sum = 0;
    for (double c : m.coef()) {
      CHECK(std::abs(c) <= m.C());
      CHECK(c != 0.0);
      sum += c;
    }
    CHECK(std::abs(sum) <= 1e-6 * m.C() * double(x.rows()));
    CHECK(m.support_vectors().rows() == m.coef().size());
  }
}

TEST_CASE("property: RBF decision values do not depend on row order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto [x, y] = blobs(rng, 40, 3, 0.5);
    std::vector<std::size_t> perm(40);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> yp(40);
    for (std::size_t i = 0; i < 40; ++i) yp[i] = y[perm[i]];
    KernelSvmOptions o;
    o.C = 2.0;
    const auto a = train_binary_rbf(x, y, o);
    const auto b = train_binary_rbf(permuted(x, perm), yp, o);
    const Matrix probe = gaussian(rng, 30, 3);
    const auto da = a.decision(probe), db = b.decision(probe);
    for (std::size_t i = 0; i < da.size(); ++i) CHECK(std::abs(da[i] - db[i]) < 1e-6);
  }
}

TEST_CASE("default gamma is scale-aware") {
  const auto unit = Matrix::from_rows({{1, -1}, {-1, 1}});
  CHECK(default_gamma(unit) == doctest::Approx(0.5));
  const auto scaled = Matrix::from_rows({{3, -3}, {-3, 3}});
  CHECK(default_gamma(scaled) == doctest::Approx(0.5 / 9));
  CHECK(default_gamma(Matrix(3, 4, 2.0)) == doctest::Approx(0.25));
  // Scaling inputs by a and gamma by 1/a^2 leaves kernel values unchanged.
  const std::vector<double> p{1.0, 2.0}, q{-0.5, 0.25};
  const std::vector<double> p2{4.0, 8.0}, q2{-2.0, 1.0};
  CHECK(kernel_rbf(p, q, 0.3) == doctest::Approx(kernel_rbf(p2, q2, 0.3 / 16)).epsilon(1e-15));
}

TEST_CASE("RBF training errors") {
  const auto x = Matrix::from_rows({{0}, {1}});
  KernelSvmOptions o;
  CHECK_THROWS_AS(train_binary_rbf(x, std::vector<int>{1, 1}, o), Error);
  CHECK_THROWS_AS(train_binary_rbf(x, std::vector<int>{1, 2}, o), Error);
  o.C = -1;
  CHECK_THROWS_AS(train_binary_rbf(x, std::vector<int>{1, -1}, o), Error);
  o.C = 1;
  o.gamma = -1;
  CHECK_THROWS_AS(train_binary_rbf(x, std::vector<int>{1, -1}, o), Error);
}

TEST_CASE("models round trip through JSON") {
  std::mt19937_64 rng(2);
  auto [x, yi] = blobs(rng, 30, 3, 1.0);
  std::vector<std::string> ys;
  for (int v : yi) ys.push_back(v > 0 ? "pos" : "neg");
  const auto lin = train_linear_multiclass(x, ys, {});
  const auto lj = to_json(lin, "emb");
  CHECK(lj.at("kind") == "linear-ovr-svm");
  CHECK(lj.at("version") == 1);
  const auto lin2 = linear_model_from_json(nlohmann::json::parse(lj.dump()));
  CHECK(lin2.classes() == lin.classes());
  CHECK(lin2.weights() == lin.weights());
  CHECK(lin2.bias() == lin.bias());

  const auto ker = train_binary_rbf(x, yi, {});
  const auto kj = to_json(ker, "pos", "emb");
  const auto ker2 = kernel_model_from_json(nlohmann::json::parse(kj.dump()));
  CHECK(ker2.coef() == ker.coef());
  CHECK(ker2.bias() == ker.bias());
  CHECK(ker2.gamma() == ker.gamma());
  CHECK(ker2.decision(x) == ker.decision(x));

  CHECK_THROWS_AS(kernel_model_from_json(lj), Error);
  auto wrong = lj;
  wrong["version"] = 99;
  CHECK_THROWS_AS(linear_model_from_json(wrong), Error);
  auto broken = lj;
  broken.erase("weights");
  CHECK_THROWS_AS(linear_model_from_json(broken), Error);
}

TEST_CASE("class metrics") {
  ClassMetrics m{"x", 3, 1, 2};
  CHECK(m.precision() == doctest::Approx(0.75));
  CHECK(m.recall() == doctest::Approx(0.6));
  CHECK(m.f1() == doctest::Approx(2 * 0.75 * 0.6 / 1.35));
  ClassMetrics empty{"y", 0, 0, 0};
  CHECK(empty.f1() == 0.0);
}

TEST_CASE("cross-validation with stub predictors") {
  std::vector<std::string> labels;
  for (int i = 0; i < 90; ++i) labels.push_back("big");
  for (int i = 0; i < 10; ++i) labels.push_back("small");
  const FoldPredictor perfect = [&](std::span<const std::size_t>, std::span<const std::size_t> test) {
    std::vector<std::string> out;
    for (auto i : test) out.push_back(labels[i]);
    return out;
  };
  const auto p = cross_validate(labels, 10, perfect, 1);
  for (const auto& c : p.per_class) CHECK(c.f1() == 1.0);
  CHECK(p.micro.f1() == 1.0);
  CHECK(p.predictions == labels);

  const FoldPredictor majority = [](std::span<const std::size_t>, std::span<const std::size_t> test) {
    return std::vector<std::string>(test.size(), "big");
  };
  const auto m = cross_validate(labels, 10, majority, 1);
  REQUIRE(m.per_class.size() == 2);
  CHECK(m.per_class[1].label == "small");
  CHECK(m.per_class[1].f1() == 0.0);
  CHECK(m.per_class[0].recall() == 1.0);
  CHECK(m.micro.precision() == doctest::Approx(0.9));

  CHECK_THROWS_AS(cross_validate(labels, 1, perfect, 1), Error);
  CHECK_THROWS_AS(cross_validate(labels, 101, perfect, 1), Error);
}

TEST_CASE("property: stratified folds partition the data and balance every class") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng() % 150;
    std::vector<std::string> labels(n);
    for (auto& l : labels) l = "c" + std::to_string(rng() % 5);
    const std::size_t k = 2 + rng() % 9;
    std::vector<std::string> warnings;
    const auto seed = rng();
    const auto folds = stratified_folds(labels, k, seed, &warnings);
    REQUIRE(folds.size() == k);
    std::vector<std::size_t> all;
    for (const auto& f : folds) all.insert(all.end(), f.begin(), f.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(all == expect);
    std::map<std::string, std::size_t> totals;
    for (const auto& l : labels) ++totals[l];
    bool small = false;
    for (const auto& [l, t] : totals) {
      small |= t < k;
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        const auto c = std::size_t(std::count_if(f.begin(), f.end(), [&](std::size_t i) { return labels[i] == l; }));
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      CHECK(hi - lo <= 1);
    }
    CHECK(small == !warnings.empty());
    CHECK(stratified_folds(labels, k, seed) == folds);
  }
}

TEST_CASE("micro average pools counts") {
  const std::vector<std::string> gold{"a", "a", "b", "b", "c"};
  const std::vector<std::string> pred{"a", "b", "b", "b", "a"};
  const auto r = score_predictions(gold, pred);
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (const auto& c : r.per_class) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  CHECK(r.micro.tp == tp);
  CHECK(r.micro.fp == fp);
  CHECK(r.micro.fn == fn);
  CHECK(r.micro.f1() == doctest::Approx(0.6));
}

TEST_CASE("linear SVM predictor reaches high accuracy under cross-validation") {
  std::mt19937_64 rng(13);
  Matrix x = gaussian(rng, 120, 6, 0.3);
  std::vector<std::string> y(120);
  for (std::size_t i = 0; i < 120; ++i) {
    y[i] = "r" + std::to_string(i % 4);
    x(i, i % 4) += 3.0;
  }
  const auto r = cross_validate(y, 10, linear_svm_predictor(x, y, {}), 7);
  CHECK(r.micro.f1() >= 0.95);
}
