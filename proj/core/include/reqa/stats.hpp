#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reqa/task.hpp"

namespace reqa {

/// Corpus characterization: structural counts, token-length statistics,
/// query coverage, and the question-type distribution.
struct DatasetStats {
  uint64_t n_questions = 0;
  uint64_t n_candidates = 0;
  uint64_t n_paragraphs = 0;
  double question_tokens_mean = 0.0, question_tokens_stddev = 0.0;
  double answer_tokens_mean = 0.0, answer_tokens_stddev = 0.0;
  double coverage_mean = 0.0, coverage_stddev = 0.0;  // percent
  std::vector<std::pair<std::string, double>> type_percent;  // all types, canonical order
};

/// Lengths are in lowercase alphanumeric tokens. Coverage per question is
/// 100·|question token types ∩ gold-sentence token types|/|question token
/// types|, averaged over the gold sentences, then over questions. Answer
/// length averages the gold sentences' token counts the same way. Stddevs
/// are population stddevs.
DatasetStats compute_stats(const Task& task, unsigned threads = 0);

std::string stats_to_json(const DatasetStats& stats);

/// Three tables: counts, token statistics, type distribution.
std::string stats_to_markdown(const DatasetStats& stats);

}  // namespace reqa
