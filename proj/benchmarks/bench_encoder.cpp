#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "reqa/embedding.hpp"

namespace {

const std::string kSentence =
    "The observatory archive holds twelve thousand photographic plates from "
    "the 1910 transit series.";
const std::string kContext =
    "The observatory was founded in 1889. " + kSentence +
    " Astronomers still consult the collection every winter.";

reqa::IdfTable small_idf() {
  const std::vector<std::string> docs = {kContext, "The river floods the meadow in spring.",
                                         "Eel fishing shaped the town for two centuries."};
  return reqa::fit_idf(docs, reqa::HashEncoderConfig{}.seed);
}

void BM_EncodeAnswer(benchmark::State& state) {
  const reqa::IdfTable idf = small_idf();
  const reqa::HashEncoderConfig config;
  for (auto _ : state)
    benchmark::DoNotOptimize(reqa::encode_answer(kSentence, kContext, idf, config));
  state.SetBytesProcessed(state.iterations() * (kSentence.size() + kContext.size()));
}
BENCHMARK(BM_EncodeAnswer);

void BM_EncodeQuestion(benchmark::State& state) {
  const reqa::IdfTable idf = small_idf();
  const reqa::HashEncoderConfig config;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        reqa::encode_question("How many plates does the archive hold?", idf, config));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EncodeQuestion);

void BM_FitIdf(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(small_idf());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FitIdf);

}  // namespace
