#include "reqa/bm25.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "reqa/error.hpp"
#include "reqa/text.hpp"
#include "wire.hpp"

namespace reqa {
namespace {

double idf_of(size_t doc_count, size_t df) {
  // ln((N - df + 0.5) / (df + 0.5) + 1): the +1 keeps weights of very common
  // terms positive.
  const double n = static_cast<double>(doc_count);
  const double d = static_cast<double>(df);
  return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

}  // namespace

Bm25Index Bm25Index::build(const std::vector<std::string>& paragraphs, Bm25Params params) {
  if (paragraphs.empty()) throw Error(errc::empty_input, "cannot index zero paragraphs");
  if (!(params.k1 > 0.0)) throw Error(errc::invalid_argument, "k1 must be positive");
  if (params.b < 0.0 || params.b > 1.0)
    throw Error(errc::invalid_argument, "b must lie in [0, 1]");

  Bm25Index index;
  index.m_params = params;
  index.m_lengths.reserve(paragraphs.size());

  uint64_t total_length = 0;
  std::unordered_map<std::string, uint32_t> tf;
  for (uint32_t p = 0; p < paragraphs.size(); ++p) {
    const std::vector<std::string> tokens = tokenize(paragraphs[p]);
    index.m_lengths.push_back(static_cast<uint32_t>(tokens.size()));
    total_length += tokens.size();
    tf.clear();
    for (const std::string& t : tokens) ++tf[t];
    // Paragraphs arrive in ascending order, so appends keep postings sorted.
    for (const auto& [term, count] : tf) index.m_postings[term].push_back({p, count});
  }
  index.m_avg_length =
      static_cast<double>(total_length) / static_cast<double>(paragraphs.size());
  return index;
}

double Bm25Index::idf(std::string_view term) const {
  const auto it = m_postings.find(std::string(term));
  return idf_of(document_count(), it == m_postings.end() ? 0 : it->second.size());
}

void Bm25Index::score_into(std::string_view query, std::vector<double>& scores) const {
  scores.assign(document_count(), 0.0);
  if (m_avg_length <= 0.0) return;
  const double k1 = m_params.k1;
  const double b = m_params.b;
  // Each query-token occurrence contributes separately (multiset semantics).
  for (const std::string& token : tokenize(query)) {
    const auto it = m_postings.find(token);
    if (it == m_postings.end()) continue;
    const double w = idf_of(document_count(), it->second.size());
    for (const Posting& post : it->second) {
      const double tf = post.tf;
      const double norm = 1.0 - b + b * (m_lengths[post.paragraph] / m_avg_length);
      scores[post.paragraph] += w * tf * (k1 + 1.0) / (tf + k1 * norm);
    }
  }
}

std::vector<Bm25Scored> Bm25Index::score(std::string_view query, size_t top_n) const {
  std::vector<double> dense;
  score_into(query, dense);
  std::vector<Bm25Scored> out;
  for (uint32_t p = 0; p < dense.size(); ++p)
    if (dense[p] > 0.0) out.push_back({p, dense[p]});
  std::sort(out.begin(), out.end(), [](const Bm25Scored& a, const Bm25Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.paragraph < b.paragraph;
  });
  if (top_n > 0 && out.size() > top_n) out.resize(top_n);
  return out;
}

void save_bm25(const Bm25Index& index, const std::filesystem::path& path) {
  std::string buf;
  buf.append("RQBM");
  wire::append_u32(buf, 1);
  wire::append_u64(buf, std::bit_cast<uint64_t>(index.params().k1));
  wire::append_u64(buf, std::bit_cast<uint64_t>(index.params().b));
  wire::append_u64(buf, index.document_count());
  for (uint32_t len : index.lengths()) wire::append_u32(buf, len);
  wire::append_u64(buf, index.postings().size());
  for (const auto& [term, posts] : index.postings()) {
    wire::append_u32(buf, static_cast<uint32_t>(term.size()));
    buf.append(term);
    wire::append_u64(buf, posts.size());
    for (const auto& post : posts) {
      wire::append_u32(buf, post.paragraph);
      wire::append_u32(buf, post.tf);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(errc::io_error, "short write to " + path.string());
}

Bm25Index load_bm25(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  size_t off = 0;
  auto need = [&](size_t n) {
    if (bytes.size() - off < n)
      throw Error(errc::truncated, path.string() + ": unexpected end of file");
  };

  need(32);
  if (std::memcmp(p, "RQBM", 4) != 0)
    throw Error(errc::bad_magic, path.string() + ": not a bm25 index (bad magic)");
  const uint32_t version = wire::read_u32(p + 4);
  if (version != 1)
    throw Error(errc::bad_version,
                path.string() + ": unsupported version " + std::to_string(version));
  Bm25Index index;
  index.m_params.k1 = std::bit_cast<double>(wire::read_u64(p + 8));
  index.m_params.b = std::bit_cast<double>(wire::read_u64(p + 16));
  const uint64_t docs = wire::read_u64(p + 24);
  off = 32;
  if (!(index.m_params.k1 > 0.0) || index.m_params.b < 0.0 || index.m_params.b > 1.0)
    throw Error(errc::validation_error, path.string() + ": parameters out of range");

  need(docs * 4);
  index.m_lengths.resize(docs);
  uint64_t total_length = 0;
  for (uint64_t i = 0; i < docs; ++i) {
    index.m_lengths[i] = wire::read_u32(p + off + i * 4);
    total_length += index.m_lengths[i];
  }
  off += docs * 4;
  index.m_avg_length = docs ? static_cast<double>(total_length) / static_cast<double>(docs) : 0.0;

  need(8);
  const uint64_t terms = wire::read_u64(p + off);
  off += 8;
  std::string prev_term;
  for (uint64_t t = 0; t < terms; ++t) {
    need(4);
    const uint32_t len = wire::read_u32(p + off);
    off += 4;
    need(len);
    std::string term(bytes.data() + off, len);
    off += len;
    if (t > 0 && term <= prev_term)
      throw Error(errc::validation_error, path.string() + ": terms are not strictly sorted");
    need(8);
    const uint64_t count = wire::read_u64(p + off);
    off += 8;
    need(count * 8);
    auto& posts = index.m_postings[term];
    posts.resize(count);
    for (uint64_t i = 0; i < count; ++i) {
      posts[i].paragraph = wire::read_u32(p + off + i * 8);
      posts[i].tf = wire::read_u32(p + off + i * 8 + 4);
      if (posts[i].paragraph >= docs)
        throw Error(errc::validation_error, path.string() + ": posting paragraph out of range");
      if (i > 0 && posts[i].paragraph <= posts[i - 1].paragraph)
        throw Error(errc::validation_error, path.string() + ": postings not sorted");
    }
    off += count * 8;
    prev_term = std::move(term);
  }
  if (off != bytes.size())
    throw Error(errc::truncated, path.string() + ": trailing bytes after postings");
  return index;
}

}  // namespace reqa
