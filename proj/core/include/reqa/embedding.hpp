#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reqa/task.hpp"

namespace reqa {

/// Row-major float32 matrix with a row-aligned id manifest.
struct EmbeddingMatrix {
  uint32_t dim = 0;
  std::vector<float> data;            // rows × dim
  std::vector<std::string> manifest;  // row ids, row order

  size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const float> row(size_t i) const { return {data.data() + i * dim, dim}; }
  std::span<float> row(size_t i) { return {data.data() + i * dim, dim}; }
};

/// Checks shape/manifest alignment and (optionally) unit row norms.
void validate_matrix(const EmbeddingMatrix& m, bool require_unit_norm = false);

/// Inverse document frequencies over hashed features.
/// idf(f) = ln((N + 1) / (df(f) + 1)) + 1; unseen features take df = 0.
struct IdfTable {
  uint64_t seed = 0;
  uint64_t doc_count = 0;
  std::unordered_map<uint64_t, uint32_t> df;

  double idf_of_hash(uint64_t feature_hash) const;
  double idf(std::string_view feature) const;  // convenience for tests/tools
};

struct HashEncoderConfig {
  uint32_t dim = 512;
  double alpha = 0.75;             // sentence weight; 1 - alpha goes to context
  uint64_t seed = 0x52455141ULL;   // "REQA"
};

/// Fit over explicit documents (one string = one document).
IdfTable fit_idf(std::span<const std::string> documents, uint64_t seed);

/// Fit over a task's candidates: each candidate's sentence and enclosing
/// context count as one document.
IdfTable fit_idf(const Task& task, const HashEncoderConfig& config);

/// Signed-hashing TF-IDF embedding of lowercased unigram+bigram tokens.
/// v = alpha·ĥ(sentence) + (1−alpha)·ĥ(context), both parts L2-normalized
/// before mixing, result L2-normalized.
std::vector<float> encode_answer(std::string_view sentence, std::string_view context,
                                 const IdfTable& idf, const HashEncoderConfig& config);

/// Question encoding uses the question text only (alpha fixed to 1).
std::vector<float> encode_question(std::string_view question, const IdfTable& idf,
                                   const HashEncoderConfig& config);

/// Encode every candidate / question of a task. Row i corresponds to
/// candidate_id / question_id i; manifest ids are those ids in decimal.
EmbeddingMatrix encode_all_answers(const Task& task, const IdfTable& idf,
                                   const HashEncoderConfig& config, unsigned threads = 0);
EmbeddingMatrix encode_all_questions(const Task& task, const IdfTable& idf,
                                     const HashEncoderConfig& config, unsigned threads = 0);

/// Bit-exact vector file format. Layout: magic "RQAV", version u32 = 1 LE,
/// row count u64 LE, dim u32 LE, rows×dim float32 LE row-major. The manifest
/// lives beside the vectors at path + ".ids", one id per line, line order =
/// row order.
void write_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_matrix(const std::filesystem::path& path);

}  // namespace reqa
