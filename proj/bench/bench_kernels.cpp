// Serial reference kernels versus their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "covr/kernels.h"

using namespace covr;

namespace {

constexpr std::size_t kDim = 4096;

std::vector<float> random_matrix(std::size_t rows, std::size_t dim) {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> g;
  std::vector<float> m(rows * dim);
  for (auto& x : m) x = g(rng);
  return m;
}

std::vector<TokenEmbeddingSequence> random_batch(std::size_t n, std::size_t tokens, std::size_t dim) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<TokenEmbeddingSequence> batch;
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<std::string> words;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < tokens; ++i) {
      words.push_back(i % 3 == 0 ? " the" : " word" + std::to_string(i));
      std::vector<double> row(dim);
      for (auto& x : row) x = g(rng);
      rows.push_back(std::move(row));
    }
    batch.emplace_back(words, rows);
  }
  return batch;
}

void BM_DotScoresSerial(benchmark::State& state) {
  std::size_t rows = static_cast<std::size_t>(state.range(0));
  auto m = random_matrix(rows, kDim);
  std::vector<double> q(kDim, 0.01), out(rows);
  for (auto _ : state) {
    kernels::dot_scores_serial(q, m, kDim, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}

void BM_DotScoresParallel(benchmark::State& state) {
  std::size_t rows = static_cast<std::size_t>(state.range(0));
  auto m = random_matrix(rows, kDim);
  std::vector<double> q(kDim, 0.01), out(rows);
  for (auto _ : state) {
    kernels::dot_scores_parallel(q, m, kDim, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}

void BM_PoolBatchSerial(benchmark::State& state) {
  auto batch = random_batch(static_cast<std::size_t>(state.range(0)), 64, 512);
  auto strategy = PoolingStrategy::weighted(std::make_shared<WeightingScheme>());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pool_batch_serial(batch, strategy));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PoolBatchParallel(benchmark::State& state) {
  auto batch = random_batch(static_cast<std::size_t>(state.range(0)), 64, 512);
  auto strategy = PoolingStrategy::weighted(std::make_shared<WeightingScheme>());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pool_batch_parallel(batch, strategy));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_DotScoresSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_DotScoresParallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_PoolBatchSerial)->Arg(16)->Arg(128);
BENCHMARK(BM_PoolBatchParallel)->Arg(16)->Arg(128);

BENCHMARK_MAIN();
