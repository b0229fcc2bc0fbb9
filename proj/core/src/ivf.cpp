#include "reqa/ivf.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "reqa/dot.hpp"
#include "reqa/error.hpp"
#include "reqa/hashing.hpp"
#include "reqa/parallel.hpp"
#include "wire.hpp"

namespace reqa {
namespace {

// Nearest centroid by squared distance, ties to the lowest centroid id.
uint32_t nearest_centroid(const IvfIndex& index, std::span<const float> v) {
  uint32_t best = 0;
  double best_dist = squared_distance(v, index.centroid(0));
  for (uint32_t c = 1; c < index.k(); ++c) {
    const double d = squared_distance(v, index.centroid(c));
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

IvfIndex build_ivf(const EmbeddingMatrix& answers, uint32_t k, uint64_t seed, unsigned threads) {
  validate_matrix(answers);
  const size_t rows = answers.rows();
  if (k == 0) throw Error(errc::invalid_argument, "cluster count must be positive");
  if (k > rows)
    throw Error(errc::invalid_argument, "cluster count " + std::to_string(k) + " exceeds " +
                                            std::to_string(rows) + " rows");

  IvfIndex index;
  index.dim = answers.dim;
  index.default_probes = std::max<uint32_t>(1, k / 16);
  index.centroids.resize(static_cast<size_t>(k) * answers.dim);

  // Seed centroids with k distinct rows (partial Fisher–Yates).
  std::vector<uint32_t> perm(rows);
  std::iota(perm.begin(), perm.end(), 0u);
  SplitMix64 rng(seed);
  for (uint32_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(rng.next_below(rows - i));
    std::swap(perm[i], perm[j]);
    auto src = answers.row(perm[i]);
    std::copy(src.begin(), src.end(), index.centroids.begin() + static_cast<size_t>(i) * index.dim);
  }

  std::vector<uint32_t> assign(rows, UINT32_MAX);
  std::vector<double> sums(static_cast<size_t>(k) * index.dim);
  std::vector<size_t> counts(k);
  std::vector<double> dist_to_own(rows);

  for (uint32_t iter = 0; iter < kIvfMaxIterations; ++iter) {
    // Assignment: pure per row, so parallel order cannot matter.
    std::atomic<bool> changed{false};
    parallel_chunks(rows, 512, threads, [&](size_t, size_t begin, size_t end) {
      bool local = false;
      for (size_t r = begin; r < end; ++r) {
        const uint32_t c = nearest_centroid(index, answers.row(r));
        if (c != assign[r]) {
          assign[r] = c;
          local = true;
        }
      }
      if (local) changed.store(true, std::memory_order_relaxed);
    });
    if (!changed.load()) break;

    // Update: serial accumulation in row order keeps sums bit-stable.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), size_t{0});
    for (size_t r = 0; r < rows; ++r) {
      double* s = sums.data() + static_cast<size_t>(assign[r]) * index.dim;
      const auto v = answers.row(r);
      for (uint32_t d = 0; d < index.dim; ++d) s[d] += v[d];
      ++counts[assign[r]];
    }
    std::vector<uint32_t> empties;
    for (uint32_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        empties.push_back(c);
        continue;
      }
      const double inv = 1.0 / static_cast<double>(counts[c]);
      float* dst = index.centroids.data() + static_cast<size_t>(c) * index.dim;
      const double* s = sums.data() + static_cast<size_t>(c) * index.dim;
      for (uint32_t d = 0; d < index.dim; ++d) dst[d] = static_cast<float>(s[d] * inv);
    }

    if (!empties.empty()) {
      // Reseed each empty centroid with the row farthest from its own
      // (fresh) centroid; ties fall to the lower row id.
      parallel_chunks(rows, 512, threads, [&](size_t, size_t begin, size_t end) {
        for (size_t r = begin; r < end; ++r)
          dist_to_own[r] = squared_distance(answers.row(r), index.centroid(assign[r]));
      });
      std::vector<uint32_t> order(rows);
      std::iota(order.begin(), order.end(), 0u);
      std::partial_sort(order.begin(), order.begin() + empties.size(), order.end(),
                        [&](uint32_t a, uint32_t b) {
                          if (dist_to_own[a] != dist_to_own[b]) return dist_to_own[a] > dist_to_own[b];
                          return a < b;
                        });
      for (size_t i = 0; i < empties.size(); ++i) {
        const uint32_t c = empties[i];
        const auto src = answers.row(order[i]);
        std::copy(src.begin(), src.end(),
                  index.centroids.begin() + static_cast<size_t>(c) * index.dim);
      }
    }
  }

  index.lists.assign(k, {});
  for (size_t r = 0; r < rows; ++r) {
    // Final pass against the final centroids, so lists match what
    // select_probes will see at query time.
    index.lists[nearest_centroid(index, answers.row(r))].push_back(static_cast<uint32_t>(r));
  }
  return index;
}

std::vector<uint32_t> select_probes(const IvfIndex& index, std::span<const float> query,
                                    uint32_t probes) {
  if (index.k() == 0) throw Error(errc::invalid_argument, "ivf index is empty");
  if (query.size() != index.dim)
    throw Error(errc::dimension_mismatch, "query dim " + std::to_string(query.size()) +
                                              " does not match index dim " +
                                              std::to_string(index.dim));
  if (probes == 0) probes = index.default_probes;
  probes = std::min(probes, index.k());

  std::vector<uint32_t> order(index.k());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> dist(index.k());
  for (uint32_t c = 0; c < index.k(); ++c) dist[c] = squared_distance(query, index.centroid(c));
  std::partial_sort(order.begin(), order.begin() + probes, order.end(),
                    [&](uint32_t a, uint32_t b) {
                      if (dist[a] != dist[b]) return dist[a] < dist[b];
                      return a < b;
                    });
  order.resize(probes);
  return order;
}

std::vector<ScoredId> ann_search(const IvfIndex& index, const EmbeddingMatrix& answers,
                                 std::span<const float> query, size_t top_n, uint32_t probes) {
  if (answers.dim != index.dim)
    throw Error(errc::dimension_mismatch, "answer matrix dim does not match index dim");
  if (top_n == 0) return {};

  std::vector<ScoredId> scored;
  for (uint32_t c : select_probes(index, query, probes)) {
    for (uint32_t id : index.lists[c]) {
      if (id >= answers.rows())
        throw Error(errc::validation_error,
                    "posting list row " + std::to_string(id) + " is out of range");
      scored.push_back({id, dot(query, answers.row(id))});
    }
  }
  const size_t n = std::min(top_n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + n, scored.end(),
                    [](const ScoredId& a, const ScoredId& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.id < b.id;
                    });
  scored.resize(n);
  return scored;
}

void save_ivf(const IvfIndex& index, const std::filesystem::path& path) {
  if (index.dim == 0) throw Error(errc::dimension_mismatch, "index dim is zero");
  for (float v : index.centroids)
    if (!std::isfinite(v)) throw Error(errc::non_finite, "index has non-finite centroids");

  std::string buf;
  buf.append("RQIV");
  wire::append_u32(buf, 1);
  wire::append_u32(buf, index.dim);
  wire::append_u32(buf, index.k());
  wire::append_u32(buf, index.default_probes);
  for (float v : index.centroids) wire::append_u32(buf, std::bit_cast<uint32_t>(v));
  for (const auto& list : index.lists) {
    wire::append_u64(buf, list.size());
    for (uint32_t id : list) wire::append_u32(buf, id);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(errc::io_error, "short write to " + path.string());
}

IvfIndex load_ivf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  size_t off = 0;
  auto need = [&](size_t n) {
    if (bytes.size() - off < n)
      throw Error(errc::truncated, path.string() + ": unexpected end of file");
  };

  need(20);
  if (std::memcmp(p, "RQIV", 4) != 0)
    throw Error(errc::bad_magic, path.string() + ": not an ivf index (bad magic)");
  const uint32_t version = wire::read_u32(p + 4);
  if (version != 1)
    throw Error(errc::bad_version,
                path.string() + ": unsupported version " + std::to_string(version));
  IvfIndex index;
  index.dim = wire::read_u32(p + 8);
  const uint32_t k = wire::read_u32(p + 12);
  index.default_probes = wire::read_u32(p + 16);
  off = 20;
  if (index.dim == 0) throw Error(errc::dimension_mismatch, path.string() + ": dim is zero");

  need(static_cast<size_t>(k) * index.dim * 4);
  index.centroids.resize(static_cast<size_t>(k) * index.dim);
  for (size_t i = 0; i < index.centroids.size(); ++i)
    index.centroids[i] = std::bit_cast<float>(wire::read_u32(p + off + i * 4));
  off += index.centroids.size() * 4;
  for (float v : index.centroids)
    if (!std::isfinite(v))
      throw Error(errc::non_finite, path.string() + ": non-finite centroid values");

  index.lists.resize(k);
  for (uint32_t c = 0; c < k; ++c) {
    need(8);
    const uint64_t n = wire::read_u64(p + off);
    off += 8;
    need(n * 4);
    index.lists[c].resize(n);
    for (uint64_t i = 0; i < n; ++i) index.lists[c][i] = wire::read_u32(p + off + i * 4);
    off += n * 4;
  }
  if (off != bytes.size())
    throw Error(errc::truncated, path.string() + ": trailing bytes after posting lists");
  return index;
}

}  // namespace reqa
