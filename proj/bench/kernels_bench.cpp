// Serial reference kernels against their OpenMP versions.

#include <random>

#include <benchmark/benchmark.h>

#include "smoothrank/dataset.hpp"
#include "smoothrank/ranker.hpp"
#include "smoothrank/smoothing.hpp"
#include "smoothrank/survival.hpp"

namespace sr = smoothrank;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (double& v : out) v = normal(rng);
  return out;
}

sr::Execution mode(const benchmark::State& state) {
  return state.range(1) ? sr::Execution::parallel : sr::Execution::serial;
}

void BM_Kde(benchmark::State& state) {
  const auto xs = normals(static_cast<std::size_t>(state.range(0)), 1);
  const double bw = sr::bandwidth_nrd0(xs);
  for (auto _ : state) benchmark::DoNotOptimize(sr::kde_cosine(xs, bw, mode(state)));
}

void BM_Loess(benchmark::State& state) {
  const auto xs = normals(static_cast<std::size_t>(state.range(0)), 2);
  const auto ys = normals(xs.size(), 3);
  const sr::Grid grid(-3.0, 3.0);
  const auto targets = grid.points();
  for (auto _ : state) benchmark::DoNotOptimize(sr::loess_fit(xs, ys, {}, targets, mode(state)));
}

void BM_Train(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 10;
  const auto cells = normals(n * cols, 4);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 1 + static_cast<int>(i % 2);
  const sr::FeatureMatrix m(n, cols, cells);
  const sr::BinaryLabels labels(y);
  for (auto _ : state) benchmark::DoNotOptimize(sr::train(m, labels, {}, mode(state)));
}

void BM_Cindex(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto t = normals(n, 5);
  std::vector<sr::SurvivalRecord> recs(n);
  for (std::size_t i = 0; i < n; ++i) recs[i] = {std::exp(t[i]), static_cast<int>(i % 3 != 0)};
  const auto scores = normals(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(sr::harrell_counts(recs, scores, true, mode(state)));
}

void BM_Knn(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 8;
  auto cells = normals(n * cols, 7);
  for (std::size_t i = 0; i < cells.size(); i += 11) cells[i] = sr::kMissing;
  const sr::FeatureMatrix m(n, cols, cells);
  for (auto _ : state) benchmark::DoNotOptimize(sr::knn_impute(m, {}, mode(state)));
}

}  // namespace

BENCHMARK(BM_Kde)->ArgsProduct({{1000, 10000}, {0, 1}});
BENCHMARK(BM_Loess)->ArgsProduct({{1000, 10000}, {0, 1}});
BENCHMARK(BM_Train)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cindex)->ArgsProduct({{1000, 4000}, {0, 1}});
BENCHMARK(BM_Knn)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
