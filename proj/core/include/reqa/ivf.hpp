#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "reqa/embedding.hpp"

namespace reqa {

struct ScoredId {
  uint32_t id = 0;
  double score = 0.0;
  bool operator==(const ScoredId&) const = default;
};

/// Inverted-file ANN index: k-means centroids plus per-centroid posting
/// lists of candidate row ids. Lists partition all rows. The index stores
/// postings only; searches take the vector matrix they were built from, so
/// the vectors are never duplicated in memory.
struct IvfIndex {
  uint32_t dim = 0;
  std::vector<float> centroids;             // k × dim
  std::vector<std::vector<uint32_t>> lists; // row ids, ascending
  uint32_t default_probes = 1;

  uint32_t k() const { return dim == 0 ? 0 : static_cast<uint32_t>(centroids.size() / dim); }
  std::span<const float> centroid(uint32_t c) const { return {centroids.data() + size_t(c) * dim, dim}; }
};

inline constexpr uint64_t kIvfSeed = 0x49564631ULL;  // "IVF1"
inline constexpr uint32_t kIvfMaxIterations = 15;

/// Lloyd's k-means over the matrix rows with a fixed seed and iteration cap.
/// Deterministic for a given (matrix, k, seed) at any thread count.
IvfIndex build_ivf(const EmbeddingMatrix& answers, uint32_t k, uint64_t seed = kIvfSeed,
                   unsigned threads = 0);

/// The `probes` centroids nearest to the query (squared Euclidean distance,
/// ties by ascending centroid id). Shared by ann_search and the evaluator's
/// ANN path so both probe identical lists.
std::vector<uint32_t> select_probes(const IvfIndex& index, std::span<const float> query,
                                    uint32_t probes);

/// Top `top_n` rows among the probed lists by dot product, descending, ties
/// by ascending row id. probes = k scans everything and reproduces exact
/// search bit for bit.
std::vector<ScoredId> ann_search(const IvfIndex& index, const EmbeddingMatrix& answers,
                                 std::span<const float> query, size_t top_n, uint32_t probes = 0);

/// Binary layout: magic "RQIV", version u32 = 1 LE, dim u32, k u32,
/// default_probes u32, k×dim float32 centroids, then per list a u64 count
/// followed by that many u32 row ids. All little-endian.
void save_ivf(const IvfIndex& index, const std::filesystem::path& path);
IvfIndex load_ivf(const std::filesystem::path& path);

}  // namespace reqa
