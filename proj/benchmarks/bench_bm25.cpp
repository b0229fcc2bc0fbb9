#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "reqa/bm25.hpp"
#include "reqa/hashing.hpp"

namespace {

std::vector<std::string> synthetic_docs(size_t n, uint64_t seed) {
  static const char* vocab[] = {"river",  "bridge", "stone",  "mill",   "eel",    "flood",
                                "tide",   "quay",   "barge",  "net",    "market", "cargo",
                                "harbor", "lock",   "meadow", "turbine"};
  reqa::SplitMix64 rng(seed);
  std::vector<std::string> docs(n);
  for (std::string& doc : docs) {
    const size_t len = 20 + rng.next_below(80);
    for (size_t t = 0; t < len; ++t) {
      if (!doc.empty()) doc += ' ';
      doc += vocab[rng.next_below(std::size(vocab))];
    }
  }
  return docs;
}

void BM_Bm25Build(benchmark::State& state) {
  const auto docs = synthetic_docs(static_cast<size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(reqa::Bm25Index::build(docs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bm25Build)->Arg(256)->Arg(2048);

void BM_Bm25Score(benchmark::State& state) {
  const auto docs = synthetic_docs(2048, 7);
  const reqa::Bm25Index index = reqa::Bm25Index::build(docs);
  std::vector<double> scores;
  for (auto _ : state) {
    index.score_into("river flood quay at the old mill", scores);
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetItemsProcessed(state.iterations() * docs.size());
}
BENCHMARK(BM_Bm25Score);

}  // namespace
