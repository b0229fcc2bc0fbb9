#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reqa/bm25.hpp"
#include "reqa/embedding.hpp"
#include "reqa/ivf.hpp"
#include "reqa/task.hpp"

namespace reqa {

/// Fully materialized question × answer dot products. Meant for small
/// instances and oracle checks; the evaluation driver streams instead.
struct ScoreMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  double at(size_t i, size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(size_t i) const { return {data.data() + i * cols, cols}; }
};

ScoreMatrix score_all(const EmbeddingMatrix& questions, const EmbeddingMatrix& answers,
                      unsigned threads = 0);

/// Competition rank of every gold candidate under the deterministic total
/// order: rank(j) = 1 + #{j′: s(j′) > s(j)} + #{j′: s(j′) = s(j), j′ < j}.
struct GoldRanks {
  uint64_t first = 0;            // min over the gold set; feeds the MRR
  std::vector<uint64_t> ranks;   // aligned to the gold id order
};
GoldRanks rank_gold(std::span<const double> scores, std::span<const uint32_t> gold);

/// Mean reciprocal rank over per-question first-correct ranks.
double mrr(std::span<const uint64_t> first_ranks);

/// Literal recall@N: mean over questions of |top_N ∩ gold| / |gold|.
/// any_hit instead scores 1 when any gold id appears in the top N.
double recall_at_n(const std::vector<std::vector<uint32_t>>& ranked,
                   const std::vector<std::vector<uint32_t>>& gold, uint32_t n,
                   bool any_hit = false);

/// Sentence ranking → paragraph ranking: map ids, keep first occurrence.
std::vector<uint32_t> dedup_to_paragraphs(std::span<const uint32_t> ranked_sentences,
                                          std::span<const uint32_t> paragraph_of);

inline constexpr std::array<uint32_t, 3> kRecallPoints{1, 5, 10};

struct MetricBundle {
  double mrr = 0.0;
  std::array<double, 3> r_at{};      // literal, aligned to kRecallPoints
  std::array<double, 3> r_at_any{};  // any-hit
  uint64_t n_questions = 0;
  bool operator==(const MetricBundle&) const = default;
};

struct EvalReport {
  std::string granularity;  // "sentence" or "paragraph"
  MetricBundle overall;
  std::vector<std::pair<std::string, MetricBundle>> by_type;  // empty types omitted
  uint64_t n_candidates = 0;                                  // pool size at this granularity
  std::vector<uint32_t> clamped;  // recall points larger than the pool
  std::map<std::string, std::string> config;
  bool operator==(const EvalReport&) const = default;
};

struct EvalOptions {
  unsigned threads = 0;
  const IvfIndex* ann = nullptr;  // exact scoring when null
  uint32_t probes = 0;            // 0 → the index default
};

struct EvalRun {
  EvalReport sentence;
  EvalReport paragraph;
  bool operator==(const EvalRun&) const = default;
};

/// Dot-product retrieval at both granularities. Streams the score matrix in
/// fixed question chunks, so results are identical at any thread count, and
/// ann with probes = k reproduces the exact backend bit for bit. With a
/// probed subset, a question whose gold never enters the probed lists
/// contributes 0 to every metric.
EvalRun evaluate_dense(const Task& task, const EmbeddingMatrix& answers,
                       const EmbeddingMatrix& questions, const EvalOptions& options = {});

/// BM25 ranks paragraphs directly; only the paragraph report exists.
EvalReport evaluate_bm25(const Task& task, const Bm25Index& index, unsigned threads = 0);

}  // namespace reqa
