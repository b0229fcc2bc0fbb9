#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "reqa/evaluator.hpp"
#include "reqa/stats.hpp"

namespace reqa {

/// Everything a full run needs; identical configs over identical inputs
/// yield byte-identical artifacts.
struct RunConfig {
  std::string input;             // dataset file
  std::string format = "squad";  // "squad" | "nq-simplified"
  std::string out_dir;

  std::string encoder = "hash-tfidf";  // "hash-tfidf" | "external"
  std::string answers_vec;             // external vector files (encoder = external)
  std::string questions_vec;
  uint32_t dim = 512;
  double alpha = 0.75;
  uint64_t seed = 0;  // 0 keeps the documented per-module default seeds

  bool use_ivf = false;
  uint32_t clusters = 0;  // 0 → round(sqrt(candidates))
  uint32_t probes = 0;    // 0 → index default

  bool use_bm25 = false;
  double k1 = 1.2;
  double b = 0.75;

  unsigned threads = 0;  // 0 → hardware concurrency
};

/// Merge a JSON config document over `base`. Unknown keys are an error.
RunConfig config_from_json(const std::string& text, RunConfig base = {});
std::string config_to_json(const RunConfig& config);

/// Stable content hash of every field that can alter outputs.
uint64_t config_fingerprint(const RunConfig& config);

struct PipelineResult {
  std::filesystem::path task_dir;
  std::filesystem::path report_path;
  DatasetStats stats;
  EvalRun dense;
  std::optional<EvalReport> bm25;
};

/// convert → build task → stats → encode (or load external vectors) →
/// [ivf] → evaluate → [bm25] → reports. Writes pipeline.json with status
/// running/complete/failed so interrupted runs leave a stale marker, and a
/// machine-readable error object on failure.
PipelineResult run_pipeline(const RunConfig& config);

/// Resolves `path` against the REQA_DATA_DIR environment variable when it
/// does not exist as given.
std::filesystem::path resolve_input(const std::string& path);

}  // namespace reqa
