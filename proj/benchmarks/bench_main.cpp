#include <benchmark/benchmark.h>

#include <random>

#include "diffvec/cross_validation.hpp"
#include "diffvec/ppmi_svd.hpp"
#include "diffvec/spectral_clustering.hpp"
#include "diffvec/svm.hpp"
#include "diffvec/sym_eig.hpp"
#include "diffvec/synthetic.hpp"

using namespace diffvec;

namespace {

Matrix random_symmetric(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = nd(rng);
  return a;
}

void BM_SymEig(benchmark::State& state) {
  const SymmetricMatrix a(random_symmetric(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(a));
}
BENCHMARK(BM_SymEig)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond);

void BM_SpectralCluster(benchmark::State& state) {
  const auto data = planted_diffvecs(10, 50, static_cast<std::size_t>(state.range(0)), 0.05, 1);
  ClusterConfig c;
  c.k = 10;
  c.restarts = 3;
  for (auto _ : state) benchmark::DoNotOptimize(cluster(data, c));
}
BENCHMARK(BM_SpectralCluster)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_LinearSvm(benchmark::State& state) {
  const auto data = planted_diffvecs(9, 300, static_cast<std::size_t>(state.range(0)), 0.3, 2);
  const auto x = to_matrix(data);
  const auto y = labels_of(data);
  for (auto _ : state) benchmark::DoNotOptimize(train_linear_multiclass(x, y, {}));
}
BENCHMARK(BM_LinearSvm)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RbfSvm(benchmark::State& state) {
  const auto data = planted_diffvecs(2, 50, static_cast<std::size_t>(state.range(0)), 0.8, 3);
  const auto x = to_matrix(data);
  std::vector<int> y;
  for (const auto& d : data) y.push_back(d.label == data.front().label ? 1 : -1);
  for (auto _ : state) benchmark::DoNotOptimize(train_binary_rbf(x, y, {}));
}
BENCHMARK(BM_RbfSvm)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_PpmiSvd(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::string text;
  for (int i = 0; i < 20000; ++i) text += "w" + std::to_string(rng() % 400) + (i % 25 == 24 ? "\n" : " ");
  const auto counts = build_cooccurrence(preprocess_corpus(text, 1), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(truncated_svd_embed(compute_ppmi(counts, 0.75, 1.0), counts.vocab, 50, 0.5));
}
BENCHMARK(BM_PpmiSvd)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
