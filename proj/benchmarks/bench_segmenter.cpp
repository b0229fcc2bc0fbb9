#include <benchmark/benchmark.h>

#include <string>

#include "reqa/segmenter.hpp"

namespace {

const std::string kParagraph =
    "The observatory was founded in 1889 by Dr. Elena Vásquez. It sits approx. "
    "2,400 m above sea level on the Paranal ridge. Winters there reach −30 ℃! "
    "Astronomers from St. Mary's College still visit every year. The archive "
    "holds 12,000 plates, e.g. the 1910 transit series. Why do they stay? The "
    "seeing is extraordinary.";

void BM_SplitSentences(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reqa::split_sentences(kParagraph));
  state.SetBytesProcessed(state.iterations() * kParagraph.size());
}
BENCHMARK(BM_SplitSentences);

void BM_SplitLong(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 64; ++i) text += kParagraph + " ";
  for (auto _ : state) benchmark::DoNotOptimize(reqa::split_sentences(text));
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_SplitLong);

}  // namespace
