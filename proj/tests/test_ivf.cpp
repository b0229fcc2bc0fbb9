#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "reqa/dot.hpp"
#include "reqa/embedding.hpp"
#include "reqa/error.hpp"
#include "reqa/hashing.hpp"
#include "reqa/ivf.hpp"

using namespace reqa;

namespace {

EmbeddingMatrix random_unit_rows(size_t rows, uint32_t dim, uint64_t seed) {
  EmbeddingMatrix m;
  m.dim = dim;
  m.data.resize(rows * dim);
  m.manifest.reserve(rows);
  SplitMix64 rng(seed);
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

std::vector<ScoredId> brute_force(const EmbeddingMatrix& answers, std::span<const float> query,
                                  size_t top_n) {
  std::vector<ScoredId> all;
  for (size_t i = 0; i < answers.rows(); ++i)
    all.push_back({static_cast<uint32_t>(i), dot(query, answers.row(i))});
  std::sort(all.begin(), all.end(), [](const ScoredId& a, const ScoredId& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  all.resize(std::min(top_n, all.size()));
  return all;
}

}  // namespace

TEST_SUITE("ivf") {

TEST_CASE("lists partition the rows in ascending order") {
  const EmbeddingMatrix m = random_unit_rows(300, 12, 41);
  const IvfIndex index = build_ivf(m, 7);
  CHECK(index.k() == 7);
  CHECK(index.dim == 12);

  std::vector<uint32_t> seen;
  for (const auto& list : index.lists) {
    CHECK(std::is_sorted(list.begin(), list.end()));
    seen.insert(seen.end(), list.begin(), list.end());
  }
  std::sort(seen.begin(), seen.end());
  std::vector<uint32_t> expect(300);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(seen == expect);
}

TEST_CASE("build is deterministic and thread-count independent") {
  const EmbeddingMatrix m = random_unit_rows(256, 10, 7);
  const IvfIndex a = build_ivf(m, 9, kIvfSeed, 1);
  const IvfIndex b = build_ivf(m, 9, kIvfSeed, 4);
  CHECK(a.centroids == b.centroids);
  CHECK(a.lists == b.lists);
  const IvfIndex c = build_ivf(m, 9, kIvfSeed + 1, 2);
  CHECK(a.centroids != c.centroids);  // different seed, different init
}

TEST_CASE("invalid cluster counts are rejected") {
  const EmbeddingMatrix m = random_unit_rows(20, 4, 3);
  CHECK_THROWS_AS(build_ivf(m, 0), Error);
  CHECK_THROWS_AS(build_ivf(m, 21), Error);
  CHECK_NOTHROW(build_ivf(m, 20));
}

TEST_CASE("select_probes orders centroids by distance then id") {
  const EmbeddingMatrix m = random_unit_rows(128, 8, 11);
  const IvfIndex index = build_ivf(m, 6);
  const auto query = m.row(0);

  const auto two = select_probes(index, query, 2);
  REQUIRE(two.size() == 2);
  const auto all = select_probes(index, query, 6);
  REQUIRE(all.size() == 6);
  CHECK(std::vector<uint32_t>(all.begin(), all.begin() + 2) == two);

  auto dist = [&](uint32_t c) { return squared_distance(query, index.centroid(c)); };
  for (size_t i = 1; i < all.size(); ++i) {
    const double d0 = dist(all[i - 1]), d1 = dist(all[i]);
    CHECK((d0 < d1 || (d0 == d1 && all[i - 1] < all[i])));
  }

  // probes = 0 falls back to the index default; larger than k clamps.
  CHECK(select_probes(index, query, 0).size() == index.default_probes);
  CHECK(select_probes(index, query, 99).size() == 6);
}

TEST_CASE("probing every list reproduces exact search") {
  const EmbeddingMatrix m = random_unit_rows(400, 16, 23);
  const IvfIndex index = build_ivf(m, 13);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto query = m.row(rng.next_below(400));
    const auto exact = brute_force(m, query, 10);
    const auto approx = ann_search(index, m, query, 10, 13);
    REQUIRE(approx.size() == exact.size());
    for (size_t i = 0; i < exact.size(); ++i) {
      CHECK(approx[i].id == exact[i].id);
      CHECK(approx[i].score == exact[i].score);  // bitwise: same kernel
    }
  }
}

TEST_CASE("fewer probes return a subset of the probed lists") {
  const EmbeddingMatrix m = random_unit_rows(300, 8, 31);
  const IvfIndex index = build_ivf(m, 10);
  const auto query = m.row(42);
  const auto probed = select_probes(index, query, 3);
  const auto results = ann_search(index, m, query, 25, 3);
  CHECK(!results.empty());
  for (const ScoredId& r : results) {
    bool in_probed_list = false;
    for (uint32_t c : probed)
      in_probed_list |= std::binary_search(index.lists[c].begin(), index.lists[c].end(), r.id);
    CHECK(in_probed_list);
  }
  // Scores descend, ties broken by ascending id.
  for (size_t i = 1; i < results.size(); ++i)
    CHECK((results[i - 1].score > results[i].score ||
           (results[i - 1].score == results[i].score && results[i - 1].id < results[i].id)));
}

TEST_CASE("self-query lands on itself with high recall") {
  // Every row queries the index for itself; with a third of the lists
  // probed, the nearest centroid almost always holds the row.
  const EmbeddingMatrix m = random_unit_rows(240, 12, 17);
  const IvfIndex index = build_ivf(m, 9);
  size_t hits = 0;
  for (size_t r = 0; r < m.rows(); ++r) {
    const auto results = ann_search(index, m, m.row(r), 1, 3);
    if (!results.empty() && results[0].id == r) ++hits;
  }
  CHECK(double(hits) / double(m.rows()) > 0.9);
}

TEST_CASE("index files round-trip") {
  const EmbeddingMatrix m = random_unit_rows(120, 6, 53);
  const IvfIndex index = build_ivf(m, 5);
  const auto path = std::filesystem::temp_directory_path() / "reqa-roundtrip.rqiv";
  save_ivf(index, path);
  const IvfIndex loaded = load_ivf(path);
  CHECK(loaded.dim == index.dim);
  CHECK(loaded.centroids == index.centroids);
  CHECK(loaded.lists == index.lists);
  CHECK(loaded.default_probes == index.default_probes);
  std::filesystem::remove(path);
}

TEST_CASE("index file corruption is diagnosed") {
  const EmbeddingMatrix m = random_unit_rows(60, 4, 67);
  const IvfIndex index = build_ivf(m, 4);
  const auto path = std::filesystem::temp_directory_path() / "reqa-corrupt.rqiv";
  save_ivf(index, path);

  auto code_of = [&]() {
    try {
      load_ivf(path);
    } catch (const Error& e) {
      return e.code();
    }
    return errc::io_error;
  };

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("WXYZ", 4);
  }
  CHECK(code_of() == errc::bad_magic);

  save_ivf(index, path);
  {
    std::ofstream f(path, std::ios::app | std::ios::binary);
    f << "extra";
  }
  CHECK(code_of() == errc::truncated);  // trailing bytes: size mismatch

  save_ivf(index, path);
  {
    std::ifstream in(path, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    all.resize(all.size() / 2);
    std::ofstream(path, std::ios::trunc | std::ios::binary) << all;
  }
  CHECK(code_of() == errc::truncated);

  std::filesystem::remove(path);
}

}  // TEST_SUITE
