#include "reqa/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "reqa/error.hpp"
#include "reqa/hashing.hpp"
#include "reqa/parallel.hpp"
#include "reqa/text.hpp"
#include "wire.hpp"

namespace reqa {
namespace {

// Unigrams plus adjacent bigrams of the lowercased tokens, as 64-bit feature
// hashes. The bigram joiner cannot occur inside a token.
constexpr char kBigramJoiner = '\x1f';

template <typename Fn>
void for_each_feature(std::string_view text, uint64_t seed, Fn&& fn) {
  const std::vector<std::string> tokens = tokenize(text);
  std::string bigram;
  for (size_t i = 0; i < tokens.size(); ++i) {
    fn(hash64(tokens[i], seed));
    if (i + 1 < tokens.size()) {
      bigram.assign(tokens[i]);
      bigram.push_back(kBigramJoiner);
      bigram.append(tokens[i + 1]);
      fn(hash64(bigram, seed));
    }
  }
}

void add_unique_features(std::string_view text, uint64_t seed,
                         std::unordered_map<uint64_t, uint32_t>& df, uint32_t weight) {
  // Collect the document's distinct features, then bump df once per feature.
  std::vector<uint64_t> seen;
  for_each_feature(text, seed, [&](uint64_t h) { seen.push_back(h); });
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (uint64_t h : seen) df[h] += weight;
}

// Accumulates the signed-hashed tf·idf bag of `text` into a dim-sized buffer
// and L2-normalizes it. Returns false when no feature fired.
bool hashed_bag(std::string_view text, const IdfTable& idf, uint32_t dim, uint64_t seed,
                std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  bool any = false;
  for_each_feature(text, seed, [&](uint64_t h) {
    const size_t bucket = h % dim;
    const double sign = (mix64(h ^ kGolden) & 1u) ? 1.0 : -1.0;
    out[bucket] += sign * idf.idf_of_hash(h);
    any = true;
  });
  if (!any) return false;
  double norm_sq = 0.0;
  for (double v : out) norm_sq += v * v;
  if (norm_sq <= 0.0) return false;  // signed collisions cancelled everything
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : out) v *= inv;
  return true;
}

std::vector<float> encode_impl(std::string_view sentence, std::string_view context, double alpha,
                               const IdfTable& idf, const HashEncoderConfig& config,
                               const char* what) {
  if (config.dim == 0) throw Error(errc::invalid_argument, "encoder dim must be positive");
  if (alpha < 0.0 || alpha > 1.0)
    throw Error(errc::invalid_argument, "alpha must lie in [0, 1]");
  if (sentence.empty())
    throw Error(errc::empty_input, std::string(what) + " text is empty");

  std::vector<double> part(config.dim, 0.0);
  std::vector<double> acc(config.dim, 0.0);

  if (!hashed_bag(sentence, idf, config.dim, config.seed, part))
    throw Error(errc::empty_input, std::string(what) + " text has no hashable tokens");
  for (uint32_t i = 0; i < config.dim; ++i) acc[i] = alpha * part[i];

  if (alpha < 1.0 && !context.empty()) {
    // A context whose features all cancelled contributes nothing; the
    // sentence part above already guarantees a nonzero vector.
    if (hashed_bag(context, idf, config.dim, config.seed, part))
      for (uint32_t i = 0; i < config.dim; ++i) acc[i] += (1.0 - alpha) * part[i];
  }

  double norm_sq = 0.0;
  for (double v : acc) norm_sq += v * v;
  if (norm_sq <= 0.0)  // alpha = 0 with an empty or fully-cancelled context
    throw Error(errc::empty_input, std::string(what) + " vector cancelled to zero");
  const double inv = 1.0 / std::sqrt(norm_sq);
  std::vector<float> out(config.dim);
  for (uint32_t i = 0; i < config.dim; ++i) out[i] = static_cast<float>(acc[i] * inv);
  return out;
}

}  // namespace

void validate_matrix(const EmbeddingMatrix& m, bool require_unit_norm) {
  if (m.dim == 0) throw Error(errc::dimension_mismatch, "matrix dim is zero");
  if (m.data.size() % m.dim != 0)
    throw Error(errc::dimension_mismatch, "matrix data size is not a multiple of dim");
  if (m.manifest.size() != m.rows())
    throw Error(errc::manifest_mismatch,
                "manifest has " + std::to_string(m.manifest.size()) + " ids for " +
                    std::to_string(m.rows()) + " rows");
  for (float v : m.data)
    if (!std::isfinite(v)) throw Error(errc::non_finite, "matrix contains non-finite values");
  if (require_unit_norm) {
    for (size_t r = 0; r < m.rows(); ++r) {
      double norm_sq = 0.0;
      for (float v : m.row(r)) norm_sq += static_cast<double>(v) * v;
      const double norm = std::sqrt(norm_sq);
      if (norm < 1.0 - 1e-5 || norm > 1.0 + 1e-5)
        throw Error(errc::validation_error,
                    "row " + std::to_string(r) + " is not L2-normalized (|v| = " +
                        std::to_string(norm) + ")");
    }
  }
}

double IdfTable::idf_of_hash(uint64_t feature_hash) const {
  if (doc_count == 0) throw Error(errc::invalid_argument, "idf table is not fitted");
  uint32_t d = 0;
  if (auto it = df.find(feature_hash); it != df.end()) d = it->second;
  return std::log((static_cast<double>(doc_count) + 1.0) / (static_cast<double>(d) + 1.0)) + 1.0;
}

double IdfTable::idf(std::string_view feature) const { return idf_of_hash(hash64(feature, seed)); }

IdfTable fit_idf(std::span<const std::string> documents, uint64_t seed) {
  if (documents.empty()) throw Error(errc::empty_input, "cannot fit idf on zero documents");
  IdfTable table;
  table.seed = seed;
  table.doc_count = documents.size();
  for (const std::string& doc : documents) add_unique_features(doc, seed, table.df, 1);
  return table;
}

IdfTable fit_idf(const Task& task, const HashEncoderConfig& config) {
  if (task.candidates.empty()) throw Error(errc::empty_input, "task has no candidates");
  IdfTable table;
  table.seed = config.seed;
  table.doc_count = task.candidates.size();
  // Each candidate document is its sentence plus enclosing context. The
  // sentence's tokens are a contiguous run of the context's tokens, so the
  // document's distinct features are exactly the context's; every candidate
  // of a paragraph therefore contributes the same feature set once.
  std::vector<uint32_t> sentences_in(task.paragraphs.size(), 0);
  for (const Candidate& c : task.candidates) ++sentences_in[c.paragraph_ord];
  for (uint32_t ord = 0; ord < task.paragraphs.size(); ++ord)
    if (sentences_in[ord] > 0)
      add_unique_features(task.paragraphs[ord].context, config.seed, table.df, sentences_in[ord]);
  return table;
}

std::vector<float> encode_answer(std::string_view sentence, std::string_view context,
                                 const IdfTable& idf, const HashEncoderConfig& config) {
  return encode_impl(sentence, context, config.alpha, idf, config, "sentence");
}

std::vector<float> encode_question(std::string_view question, const IdfTable& idf,
                                   const HashEncoderConfig& config) {
  return encode_impl(question, {}, 1.0, idf, config, "question");
}

EmbeddingMatrix encode_all_answers(const Task& task, const IdfTable& idf,
                                   const HashEncoderConfig& config, unsigned threads) {
  if (task.candidates.empty()) throw Error(errc::empty_input, "task has no candidates");
  EmbeddingMatrix m;
  m.dim = config.dim;
  m.data.resize(task.candidates.size() * static_cast<size_t>(config.dim));
  m.manifest.reserve(task.candidates.size());
  for (const Candidate& c : task.candidates) m.manifest.push_back(std::to_string(c.candidate_id));
  parallel_chunks(task.candidates.size(), 256, threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const Candidate& c = task.candidates[i];
      std::vector<float> v;
      try {
        v = encode_answer(c.sentence, task.paragraphs[c.paragraph_ord].context, idf, config);
      } catch (const Error& e) {
        throw Error(e.code(), "candidate " + std::to_string(c.candidate_id) + ": " + e.detail());
      }
      std::copy(v.begin(), v.end(), m.data.begin() + i * config.dim);
    }
  });
  return m;
}

EmbeddingMatrix encode_all_questions(const Task& task, const IdfTable& idf,
                                     const HashEncoderConfig& config, unsigned threads) {
  if (task.questions.empty()) throw Error(errc::empty_input, "task has no questions");
  EmbeddingMatrix m;
  m.dim = config.dim;
  m.data.resize(task.questions.size() * static_cast<size_t>(config.dim));
  m.manifest.reserve(task.questions.size());
  for (const TaskQuestion& q : task.questions) m.manifest.push_back(std::to_string(q.question_id));
  parallel_chunks(task.questions.size(), 256, threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      std::vector<float> v;
      try {
        v = encode_question(task.questions[i].text, idf, config);
      } catch (const Error& e) {
        throw Error(e.code(), "question " + std::to_string(i) + ": " + e.detail());
      }
      std::copy(v.begin(), v.end(), m.data.begin() + i * config.dim);
    }
  });
  return m;
}

void write_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  validate_matrix(m);

  std::string header;
  header.append("RQAV");
  wire::append_u32(header, 1);
  wire::append_u64(header, m.rows());
  wire::append_u32(header, m.dim);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::string payload;
  payload.reserve(m.data.size() * 4);
  for (float v : m.data) wire::append_u32(payload, std::bit_cast<uint32_t>(v));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(errc::io_error, "short write to " + path.string());
  out.close();

  std::ofstream ids(path.string() + ".ids", std::ios::binary);
  if (!ids) throw Error(errc::io_error, "cannot open " + path.string() + ".ids for writing");
  for (const std::string& id : m.manifest) ids << id << '\n';
  if (!ids) throw Error(errc::io_error, "short write to " + path.string() + ".ids");
}

EmbeddingMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr size_t kHeader = 4 + 4 + 8 + 4;
  if (bytes.size() < kHeader)
    throw Error(errc::truncated, path.string() + ": file shorter than the header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, "RQAV", 4) != 0)
    throw Error(errc::bad_magic, path.string() + ": not a vector file (bad magic)");
  const uint32_t version = wire::read_u32(p + 4);
  if (version != 1)
    throw Error(errc::bad_version,
                path.string() + ": unsupported version " + std::to_string(version));
  const uint64_t rows = wire::read_u64(p + 8);
  const uint32_t dim = wire::read_u32(p + 16);
  if (dim == 0) throw Error(errc::dimension_mismatch, path.string() + ": dim is zero");

  const uint64_t want = rows * static_cast<uint64_t>(dim) * 4;
  const uint64_t have = bytes.size() - kHeader;
  if (have != want)
    throw Error(errc::truncated, path.string() + ": payload holds " + std::to_string(have / 4) +
                                     " floats, header promises " + std::to_string(want / 4));

  EmbeddingMatrix m;
  m.dim = dim;
  m.data.resize(rows * dim);
  for (size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = std::bit_cast<float>(wire::read_u32(p + kHeader + i * 4));
  for (float v : m.data)
    if (!std::isfinite(v))
      throw Error(errc::non_finite, path.string() + ": payload contains non-finite values");

  const std::string ids_path = path.string() + ".ids";
  std::ifstream ids(ids_path, std::ios::binary);
  if (!ids) throw Error(errc::io_error, "cannot open manifest " + ids_path);
  std::string line;
  while (std::getline(ids, line)) m.manifest.push_back(line);
  if (m.manifest.size() != rows)
    throw Error(errc::manifest_mismatch, ids_path + " lists " + std::to_string(m.manifest.size()) +
                                             " ids, vector file holds " + std::to_string(rows) +
                                             " rows");
  return m;
}

}  // namespace reqa
