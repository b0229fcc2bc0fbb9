#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace reqa {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  bool operator==(const Bm25Params&) const = default;
};

struct Bm25Scored {
  uint32_t paragraph = 0;
  double score = 0.0;
  bool operator==(const Bm25Scored&) const = default;
};

/// Okapi BM25 over paragraphs. Documents are indexed by dense ordinal
/// (matching Task paragraph ordinals when built from a task's contexts).
class Bm25Index {
 public:
  struct Posting {
    uint32_t paragraph = 0;
    uint32_t tf = 0;
    bool operator==(const Posting&) const = default;
  };

  /// Tokenization is the shared corpus tokenizer: lowercase, split on
  /// non-alphanumeric. Query terms score once per occurrence (multiset).
  static Bm25Index build(const std::vector<std::string>& paragraphs, Bm25Params params = {});

  /// Ranked paragraphs, score descending, ties by ascending ordinal. top_n=0
  /// ranks everything with a positive score. Unindexed query terms score 0.
  std::vector<Bm25Scored> score(std::string_view query, size_t top_n = 0) const;

  /// Adds each paragraph's score for `query` into a dense buffer of size
  /// document_count() (buffer is zeroed first). Backs the evaluator, which
  /// needs implicit zeros for unmatched paragraphs.
  void score_into(std::string_view query, std::vector<double>& scores) const;

  double idf(std::string_view term) const;
  size_t document_count() const { return m_lengths.size(); }
  double average_length() const { return m_avg_length; }
  const Bm25Params& params() const { return m_params; }
  const std::map<std::string, std::vector<Posting>>& postings() const { return m_postings; }
  const std::vector<uint32_t>& lengths() const { return m_lengths; }

  bool operator==(const Bm25Index&) const = default;

 private:
  friend Bm25Index load_bm25(const std::filesystem::path& path);

  Bm25Params m_params;
  std::map<std::string, std::vector<Posting>> m_postings;  // sorted terms
  std::vector<uint32_t> m_lengths;                         // tokens per paragraph
  double m_avg_length = 0.0;
};

/// Binary layout: magic "RQBM", version u32 = 1 LE, k1/b as float64 bits,
/// document count u64, per-document length u32, term count u64, then per
/// term (in sorted order): u32 byte length + bytes, u64 posting count,
/// postings as (u32 paragraph, u32 tf). All little-endian.
void save_bm25(const Bm25Index& index, const std::filesystem::path& path);
Bm25Index load_bm25(const std::filesystem::path& path);

}  // namespace reqa
