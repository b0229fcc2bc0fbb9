#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "reqa/dot.hpp"
#include "reqa/embedding.hpp"
#include "reqa/evaluator.hpp"
#include "reqa/hashing.hpp"

namespace {

reqa::EmbeddingMatrix random_rows(size_t rows, uint32_t dim, uint64_t seed) {
  reqa::SplitMix64 rng(seed);
  reqa::EmbeddingMatrix m;
  m.dim = dim;
  m.data.resize(rows * dim);
  for (size_t r = 0; r < rows; ++r) {
    double norm_sq = 0;
    for (uint32_t d = 0; d < dim; ++d) {
      const double v = rng.next_double() * 2.0 - 1.0;
      m.data[r * dim + d] = static_cast<float>(v);
      norm_sq += v * v;
    }
    const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (uint32_t d = 0; d < dim; ++d) m.data[r * dim + d] *= inv;
    m.manifest.push_back(std::to_string(r));
  }
  return m;
}

void BM_Dot512(benchmark::State& state) {
  const reqa::EmbeddingMatrix m = random_rows(2, 512, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reqa::dot(m.row(0), m.row(1)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Dot512);

void BM_ScoreAll(benchmark::State& state) {
  const auto questions = random_rows(static_cast<size_t>(state.range(0)), 512, 2);
  const auto answers = random_rows(2048, 512, 3);
  for (auto _ : state) benchmark::DoNotOptimize(reqa::score_all(questions, answers, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2048);
}
BENCHMARK(BM_ScoreAll)->Arg(16)->Arg(64);

}  // namespace
