// Acceptance gate: one line per criterion, [PASS]/[FAIL]/[SKIP], nonzero
// exit when anything fails. Criteria that need the full SQuAD training file
// skip honestly when it is absent; everything else runs self-contained.

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reqa/bm25.hpp"
#include "reqa/corpus.hpp"
#include "reqa/dot.hpp"
#include "reqa/embedding.hpp"
#include "reqa/error.hpp"
#include "reqa/evaluator.hpp"
#include "reqa/hashing.hpp"
#include "reqa/ivf.hpp"
#include "reqa/pipeline.hpp"
#include "reqa/report.hpp"
#include "reqa/stats.hpp"
#include "reqa/task.hpp"

using namespace reqa;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_passed = 0, g_failed = 0, g_skipped = 0;

void emit(const char* status, const std::string& id, const std::string& detail) {
  std::printf("[%s] %s: %s\n", status, id.c_str(), detail.c_str());
  std::fflush(stdout);
}
void pass(const std::string& id, const std::string& detail) {
  ++g_passed;
  emit("PASS", id, detail);
}
void fail(const std::string& id, const std::string& detail) {
  ++g_failed;
  emit("FAIL", id, detail);
}
void skip(const std::string& id, const std::string& detail) {
  ++g_skipped;
  emit("SKIP", id, detail);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path work_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / "reqa_acceptance" / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::optional<fs::path> find_squad_train() {
  if (const char* p = std::getenv("REQA_SQUAD_TRAIN"); p && fs::exists(p)) return fs::path(p);
  if (const char* d = std::getenv("REQA_DATA_DIR")) {
    const fs::path c = fs::path(d) / "squad-train-v1.1.json";
    if (fs::exists(c)) return c;
  }
  const fs::path local = fs::path(REQA_TEST_DATA) / "squad-train-v1.1.json";
  if (fs::exists(local)) return local;
  return std::nullopt;
}

const char* kSquadHint =
    "squad train json not found (tried $REQA_SQUAD_TRAIN, "
    "$REQA_DATA_DIR/squad-train-v1.1.json, data/squad-train-v1.1.json)";

// ---------------------------------------------------------------------------
// Synthetic tasks + an independent full-sort oracle (criterion 3).

struct Synthetic {
  Task task;
  EmbeddingMatrix answers;
  EmbeddingMatrix questions;
};

Synthetic make_synthetic(SplitMix64& rng, size_t max_questions, size_t max_candidates) {
  Synthetic s;
  s.task.source_name = "synthetic";
  const size_t n_candidates = 1 + rng.next_below(max_candidates);
  size_t made = 0;
  while (made < n_candidates) {
    const uint32_t pord = static_cast<uint32_t>(s.task.paragraphs.size());
    ParagraphEntry p;
    p.id = {0, pord};
    p.article_title = "synthetic";
    p.context = "paragraph " + std::to_string(pord);
    s.task.paragraphs.push_back(std::move(p));
    const size_t block = std::min<size_t>(1 + rng.next_below(6), n_candidates - made);
    for (size_t i = 0; i < block; ++i) {
      Candidate c;
      c.candidate_id = static_cast<uint32_t>(made);
      c.sentence = "sentence " + std::to_string(made);
      c.paragraph_ord = pord;
      c.paragraph_id = p.id;
      c.sentence_index = static_cast<uint32_t>(i);
      s.task.candidates.push_back(std::move(c));
      ++made;
    }
  }
  const size_t n_questions = 1 + rng.next_below(max_questions);
  s.task.gold.candidates.resize(n_questions);
  s.task.gold.paragraphs.resize(n_questions);
  for (size_t q = 0; q < n_questions; ++q) {
    TaskQuestion tq;
    tq.question_id = static_cast<uint32_t>(q);
    tq.source_id = "q" + std::to_string(q);
    tq.text = "question " + std::to_string(q);
    tq.type = kQuestionTypes[rng.next_below(std::size(kQuestionTypes))];
    s.task.questions.push_back(std::move(tq));
    auto& gc = s.task.gold.candidates[q];
    for (size_t k = 0, n = 1 + rng.next_below(3); k < n; ++k)
      gc.push_back(static_cast<uint32_t>(rng.next_below(n_candidates)));
    std::sort(gc.begin(), gc.end());
    gc.erase(std::unique(gc.begin(), gc.end()), gc.end());
    auto& gp = s.task.gold.paragraphs[q];
    for (uint32_t g : gc) gp.push_back(s.task.candidates[g].paragraph_ord);
    std::sort(gp.begin(), gp.end());
    gp.erase(std::unique(gp.begin(), gp.end()), gp.end());
  }
  const uint32_t dim = 8;
  auto fill = [&](EmbeddingMatrix& m, size_t rows) {
    m.dim = dim;
    m.data.resize(rows * dim);
    for (size_t r = 0; r < rows; ++r) {
      double norm_sq = 0;
      for (uint32_t d = 0; d < dim; ++d) {
        const double v = (double(rng.next_below(7)) - 3.0) / 3.0;  // coarse grid → real ties
        m.data[r * dim + d] = static_cast<float>(v);
        norm_sq += v * v;
      }
      if (norm_sq == 0) {
        m.data[r * dim] = 1.0f;
        norm_sq = 1.0;
      }
      const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
      for (uint32_t d = 0; d < dim; ++d) m.data[r * dim + d] *= inv;
      m.manifest.push_back(std::to_string(r));
    }
  };
  fill(s.answers, n_candidates);
  fill(s.questions, n_questions);
  return s;
}

struct OracleSamples {
  std::vector<double> rr, lit1, lit5, lit10, any1, any5, any10;
};

void oracle_outcomes(const std::vector<uint32_t>& ranking, const std::vector<uint32_t>& gold,
                     OracleSamples& out) {
  std::vector<uint32_t> sg = gold;
  std::sort(sg.begin(), sg.end());
  uint64_t first = 0;
  for (size_t pos = 0; pos < ranking.size(); ++pos)
    if (std::binary_search(sg.begin(), sg.end(), ranking[pos])) {
      first = pos + 1;
      break;
    }
  out.rr.push_back(first ? 1.0 / double(first) : 0.0);
  auto at = [&](uint32_t n, bool any) {
    uint32_t hits = 0;
    for (size_t pos = 0; pos < std::min<size_t>(n, ranking.size()); ++pos)
      if (std::binary_search(sg.begin(), sg.end(), ranking[pos])) ++hits;
    return any ? (hits > 0 ? 1.0 : 0.0) : double(hits) / double(sg.size());
  };
  out.lit1.push_back(at(1, false));
  out.lit5.push_back(at(5, false));
  out.lit10.push_back(at(10, false));
  out.any1.push_back(at(1, true));
  out.any5.push_back(at(5, true));
  out.any10.push_back(at(10, true));
}

MetricBundle oracle_bundle(const OracleSamples& in) {
  MetricBundle b;
  b.n_questions = in.rr.size();
  const double n = double(in.rr.size());
  auto mean = [&](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / n;
  };
  b.mrr = mean(in.rr);
  b.r_at = {mean(in.lit1), mean(in.lit5), mean(in.lit10)};
  b.r_at_any = {mean(in.any1), mean(in.any5), mean(in.any10)};
  return b;
}

struct OracleRun {
  MetricBundle sentence, paragraph;
  std::vector<std::pair<std::string, MetricBundle>> by_type_s, by_type_p;
};

OracleRun oracle_evaluate(const Synthetic& s) {
  const size_t nq = s.task.questions.size();
  const size_t nc = s.task.candidates.size();
  std::vector<uint32_t> paragraph_of(nc);
  for (size_t j = 0; j < nc; ++j) paragraph_of[j] = s.task.candidates[j].paragraph_ord;

  OracleSamples all_s, all_p;
  std::array<OracleSamples, std::size(kQuestionTypes)> type_s, type_p;
  for (size_t q = 0; q < nq; ++q) {
    std::vector<double> scores(nc);
    for (size_t j = 0; j < nc; ++j) scores[j] = dot(s.questions.row(q), s.answers.row(j));
    std::vector<uint32_t> ranking(nc);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::sort(ranking.begin(), ranking.end(), [&](uint32_t a, uint32_t b) {
      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    });
    std::vector<uint32_t> paragraph_ranking = dedup_to_paragraphs(ranking, paragraph_of);
    oracle_outcomes(ranking, s.task.gold.candidates[q], all_s);
    oracle_outcomes(paragraph_ranking, s.task.gold.paragraphs[q], all_p);
    const auto t = static_cast<size_t>(s.task.questions[q].type);
    oracle_outcomes(ranking, s.task.gold.candidates[q], type_s[t]);
    oracle_outcomes(paragraph_ranking, s.task.gold.paragraphs[q], type_p[t]);
  }
  OracleRun run;
  run.sentence = oracle_bundle(all_s);
  run.paragraph = oracle_bundle(all_p);
  for (size_t t = 0; t < std::size(kQuestionTypes); ++t) {
    if (type_s[t].rr.empty()) continue;
    run.by_type_s.emplace_back(to_string(kQuestionTypes[t]), oracle_bundle(type_s[t]));
    run.by_type_p.emplace_back(to_string(kQuestionTypes[t]), oracle_bundle(type_p[t]));
  }
  return run;
}

// ---------------------------------------------------------------------------
// Elementary BM25 re-derivation (criterion 4).

std::vector<std::string> simple_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char ch : text) {
    const bool word = std::isalnum(ch) || ch >= 0x80;
    if (word) {
      cur += static_cast<char>(std::tolower(ch));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> naive_bm25(const std::vector<std::string>& docs, std::string_view query,
                               double k1 = 1.2, double b = 0.75) {
  const size_t n = docs.size();
  std::vector<std::vector<std::string>> toks(n);
  double total_len = 0;
  for (size_t d = 0; d < n; ++d) {
    toks[d] = simple_tokens(docs[d]);
    total_len += double(toks[d].size());
  }
  const double avg = total_len / double(n);
  std::vector<double> scores(n, 0.0);
  for (const std::string& term : simple_tokens(query)) {
    size_t df = 0;
    for (size_t d = 0; d < n; ++d)
      if (std::count(toks[d].begin(), toks[d].end(), term) > 0) ++df;
    const double idf = std::log((double(n) - double(df) + 0.5) / (double(df) + 0.5) + 1.0);
    for (size_t d = 0; d < n; ++d) {
      const double tf = double(std::count(toks[d].begin(), toks[d].end(), term));
      if (tf == 0) continue;
      const double len = double(toks[d].size());
      scores[d] += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
    }
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Gaussian-mixture vectors and exact top-k (criterion 5).

EmbeddingMatrix gaussian_mixture(size_t rows, uint32_t dim, uint32_t comps, double sigma,
                                 uint64_t seed) {
  SplitMix64 rng(seed);
  auto gauss = [&] {
    const double u1 = 1.0 - rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  std::vector<double> means(size_t(comps) * dim);
  for (uint32_t c = 0; c < comps; ++c) {
    double norm_sq = 0;
    for (uint32_t d = 0; d < dim; ++d) {
      const double v = gauss();
      means[size_t(c) * dim + d] = v;
      norm_sq += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (uint32_t d = 0; d < dim; ++d) means[size_t(c) * dim + d] *= inv;
  }
  EmbeddingMatrix m;
  m.dim = dim;
  m.data.resize(rows * size_t(dim));
  m.manifest.reserve(rows);
  for (size_t r = 0; r < rows; ++r) {
    const uint32_t c = static_cast<uint32_t>(rng.next_below(comps));
    double norm_sq = 0;
    for (uint32_t d = 0; d < dim; ++d) {
      const double v = means[size_t(c) * dim + d] + sigma * gauss();
      m.data[r * dim + d] = static_cast<float>(v);
      norm_sq += v * v;
    }
    const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (uint32_t d = 0; d < dim; ++d) m.data[r * dim + d] *= inv;
    m.manifest.push_back(std::to_string(r));
  }
  return m;
}

std::vector<ScoredId> brute_top(const EmbeddingMatrix& m, std::span<const float> query,
                                size_t top_n) {
  auto better = [](const ScoredId& a, const ScoredId& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  std::vector<ScoredId> top;
  top.reserve(top_n + 1);
  for (size_t r = 0; r < m.rows(); ++r) {
    const ScoredId e{static_cast<uint32_t>(r), dot(query, m.row(r))};
    if (top.size() == top_n && !better(e, top.back())) continue;
    top.insert(std::upper_bound(top.begin(), top.end(), e, better), e);
    if (top.size() > top_n) top.pop_back();
  }
  return top;
}

// ---------------------------------------------------------------------------

void criterion_1_and_2_and_6b(std::optional<Task>& squad_task) {
  const std::optional<fs::path> path = find_squad_train();
  if (!path) {
    skip("1 conversion-counts", kSquadHint);
    skip("2 corpus-statistics", kSquadHint);
    return;
  }
  const auto t0 = Clock::now();
  const Corpus corpus = load_squad_file(*path);
  Task task = build_task(corpus);
  const double dt = seconds_since(t0);

  const size_t nq = task.questions.size();
  const size_t np = task.paragraphs.size();
  const size_t ns = task.candidates.size();
  const bool sentences_ok = ns >= 90790 && ns <= 92624;  // 91,707 ± 1%
  std::string detail = "questions=" + std::to_string(nq) + " paragraphs=" + std::to_string(np) +
                       " sentences=" + std::to_string(ns) + " time=" + fmt(dt, "%.1f") + "s";
  if (nq == 87599 && np == 18896 && sentences_ok && dt < 120.0) {
    pass("1 conversion-counts", detail);
  } else {
    fail("1 conversion-counts", detail + " (want questions=87599 paragraphs=18896 "
                                         "sentences in [90790,92624] time<120s)");
  }

  const DatasetStats stats = compute_stats(task);
  struct Expect {
    const char* name;
    double got, want, tol;
  };
  const std::array<Expect, 3> means{{
      {"question-tokens", stats.question_tokens_mean, 10.1, 0.05 * 10.1},
      {"answer-tokens", stats.answer_tokens_mean, 24.0, 0.05 * 24.0},
      {"coverage", stats.coverage_mean, 31.7, 0.05 * 31.7},
  }};
  const std::array<double, 8> type_want{47.7, 9.6, 9.3, 6.2, 5.5, 3.8, 1.4, 16.5};
  std::string bad;
  std::string got = "means";
  for (const Expect& e : means) {
    got += " " + std::string(e.name) + "=" + fmt(e.got, "%.2f");
    if (std::abs(e.got - e.want) > e.tol)
      bad += std::string(" ") + e.name + "=" + fmt(e.got, "%.2f") + " (want " +
             fmt(e.want, "%.1f") + "±5%)";
  }
  got += " types";
  for (size_t t = 0; t < type_want.size(); ++t) {
    const auto& [name, pct] = stats.type_percent[t];
    got += " " + name + "=" + fmt(pct, "%.1f");
    if (std::abs(pct - type_want[t]) > 1.0)
      bad += " " + name + "=" + fmt(pct, "%.1f") + " (want " + fmt(type_want[t], "%.1f") + "±1)";
  }
  if (bad.empty()) {
    pass("2 corpus-statistics", got);
  } else {
    fail("2 corpus-statistics", "outside tolerance:" + bad);
  }
  squad_task = std::move(task);
}

void criterion_3() {
  SplitMix64 rng(0xACCE5501);
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const Synthetic s = make_synthetic(rng, 50, 200);
    const EvalRun run = evaluate_dense(s.task, s.answers, s.questions);
    const OracleRun oracle = oracle_evaluate(s);
    const bool ok = run.sentence.overall == oracle.sentence &&
                    run.paragraph.overall == oracle.paragraph &&
                    run.sentence.by_type == oracle.by_type_s &&
                    run.paragraph.by_type == oracle.by_type_p;
    if (!ok) {
      fail("3 evaluator-oracle",
           "task " + std::to_string(trial) + ": streaming evaluator diverged from the "
           "full-sort oracle (exact comparison)");
      return;
    }
  }

  // Scorer against a long-double naive accumulation.
  double max_diff = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Synthetic s = make_synthetic(rng, 40, 60);
    const ScoreMatrix m = score_all(s.questions, s.answers);
    for (size_t i = 0; i < m.rows; ++i)
      for (size_t j = 0; j < m.cols; ++j) {
        long double acc = 0.0L;
        const auto q = s.questions.row(i);
        const auto a = s.answers.row(j);
        for (size_t d = 0; d < q.size(); ++d)
          acc += static_cast<long double>(q[d]) * static_cast<long double>(a[d]);
        max_diff = std::max(max_diff, std::abs(m.at(i, j) - static_cast<double>(acc)));
      }
  }
  if (max_diff <= 1e-5) {
    pass("3 evaluator-oracle", std::to_string(trials) + "/" + std::to_string(trials) +
                                   " random tasks exact, scorer max diff " + fmt(max_diff) +
                                   " <= 1e-5");
  } else {
    fail("3 evaluator-oracle", "scorer max diff " + fmt(max_diff) + " > 1e-5");
  }
}

void criterion_4() {
  const std::vector<std::string> docs = {
      "the cat sat on the mat",
      "the dog sat",
      "cats and dogs",
      "the mat",
  };
  const Bm25Index index = Bm25Index::build(docs);
  double max_diff = 0.0;
  for (const char* query : {"cat", "the mat", "the the cat", "dogs and cats", "unknownword",
                            "sat ON the MAT!", "cat cat", "mat dog"}) {
    const std::vector<double> expected = naive_bm25(docs, query);
    std::vector<double> got;
    index.score_into(query, got);
    for (size_t d = 0; d < docs.size(); ++d)
      max_diff = std::max(max_diff,
                          std::abs(got[d] - expected[d]) / std::max(1.0, std::abs(expected[d])));
  }
  // A term absent everywhere: idf = ln((4 + 0.5) / 0.5 + 1) = ln(10).
  const double idf_unseen = index.idf("sesquipedalian");
  max_diff = std::max(max_diff, std::abs(idf_unseen - std::log(10.0)));

  // Random-corpus property check against the same oracle.
  SplitMix64 rng(0xB25B25);
  const char* vocab[] = {"river", "bridge", "stone", "mill", "eel",
                         "flood", "tide",   "quay",  "barge", "net"};
  for (int trial = 0; trial < 10 && max_diff <= 1e-9; ++trial) {
    std::vector<std::string> corpus(2 + rng.next_below(8));
    for (std::string& doc : corpus) {
      const size_t len = 1 + rng.next_below(12);
      for (size_t t = 0; t < len; ++t) {
        if (!doc.empty()) doc += ' ';
        doc += vocab[rng.next_below(std::size(vocab))];
      }
    }
    const Bm25Params params{1.0 + rng.next_double(), rng.next_double() * 0.99};
    const Bm25Index rindex = Bm25Index::build(corpus, params);
    for (int q = 0; q < 20; ++q) {
      std::string query;
      for (size_t t = 0, len = 1 + rng.next_below(4); t < len; ++t) {
        if (!query.empty()) query += ' ';
        query += vocab[rng.next_below(std::size(vocab))];
      }
      const std::vector<double> expected = naive_bm25(corpus, query, params.k1, params.b);
      std::vector<double> got;
      rindex.score_into(query, got);
      for (size_t d = 0; d < corpus.size(); ++d)
        max_diff = std::max(max_diff, std::abs(got[d] - expected[d]) /
                                          std::max(1.0, std::abs(expected[d])));
    }
  }

  if (max_diff <= 1e-9) {
    pass("4 bm25-fixture", "hand fixture and 10 random corpora, max diff " + fmt(max_diff) +
                               " <= 1e-9");
  } else {
    fail("4 bm25-fixture", "max diff " + fmt(max_diff) + " > 1e-9");
  }
}

void criterion_5() {
  // Probing every list must reproduce exact search bit for bit.
  SplitMix64 rng(0x1BF5EED);
  for (int trial = 0; trial < 10; ++trial) {
    Synthetic s = make_synthetic(rng, 4, 400);
    const uint32_t k = std::min<uint32_t>(13, static_cast<uint32_t>(s.answers.rows()));
    const IvfIndex index = build_ivf(s.answers, k);
    for (int q = 0; q < 10; ++q) {
      const auto query = s.questions.row(rng.next_below(s.questions.rows()));
      const size_t top_n = std::min<size_t>(10, s.answers.rows());
      const std::vector<ScoredId> ann = ann_search(index, s.answers, query, top_n, k);
      const std::vector<ScoredId> exact = brute_top(s.answers, query, top_n);
      if (!(ann == exact)) {
        fail("5 ann-recall", "probes=k differs from exact search on trial " +
                                 std::to_string(trial));
        return;
      }
    }
  }

  // Retrieval-scale recall: 91,707 × 512 mixture, 256 lists, 16 probes.
  // Per-dimension sigma 0.02 → total in-cluster noise norm ≈ 0.02·√512 ≈ 0.45
  // against unit component means, i.e. tight, well-separated clusters.
  const auto t0 = Clock::now();
  const EmbeddingMatrix m = gaussian_mixture(91707, 512, 256, 0.02, 0x6D697874);
  const IvfIndex index = build_ivf(m, 256);
  const double build_s = seconds_since(t0);

  const auto t1 = Clock::now();
  SplitMix64 qrng(0x71756572);
  auto gauss = [&] {
    const double u1 = 1.0 - qrng.next_double();
    const double u2 = qrng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  const size_t n_queries = 500;
  double recall_sum = 0.0;
  std::vector<float> query(m.dim);
  for (size_t qi = 0; qi < n_queries; ++qi) {
    const size_t base = qrng.next_below(m.rows());
    const auto row = m.row(base);
    double norm_sq = 0;
    for (uint32_t d = 0; d < m.dim; ++d) {
      const double v = double(row[d]) + 0.01 * gauss();
      query[d] = static_cast<float>(v);
      norm_sq += v * v;
    }
    const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (uint32_t d = 0; d < m.dim; ++d) query[d] *= inv;

    const std::vector<ScoredId> exact = brute_top(m, query, 10);
    const std::vector<ScoredId> ann = ann_search(index, m, query, 10, 16);
    size_t hits = 0;
    for (const ScoredId& e : exact)
      for (const ScoredId& a : ann)
        if (a.id == e.id) {
          ++hits;
          break;
        }
    recall_sum += double(hits) / 10.0;
  }
  const double recall = recall_sum / double(n_queries);
  const double search_s = seconds_since(t1);

  const std::string detail = "probes=k bit-identical; mixture 91707x512 k=256 probes=16 "
                             "recall@10=" + fmt(recall, "%.4f") + " build=" +
                             fmt(build_s, "%.1f") + "s check=" + fmt(search_s, "%.1f") + "s";
  if (recall >= 0.95) {
    pass("5 ann-recall", detail);
  } else {
    fail("5 ann-recall", detail + " (want >= 0.95)");
  }
}

void criterion_6a() {
  const fs::path data = fs::path(REQA_TEST_DATA) / "mini" / "mini_squad.json";
  if (!fs::exists(data)) {
    fail("6a external-vectors", "mini fixture missing: " + data.string());
    return;
  }

  RunConfig base;
  base.input = data.string();
  base.out_dir = work_dir("hash_run").string();
  base.threads = 1;
  run_pipeline(base);

  // "External" vectors: a differently seeded encoder standing in for another
  // embedding model, written in the interchange format.
  const Corpus corpus = load_squad_file(data);
  const Task task = build_task(corpus);
  HashEncoderConfig enc;
  enc.seed = mix64(7 ^ 0x656e636f64657231ULL);
  const IdfTable idf = fit_idf(task, enc);
  const fs::path vec_dir = work_dir("external_vecs");
  write_matrix(encode_all_answers(task, idf, enc), vec_dir / "answers.rqav");
  write_matrix(encode_all_questions(task, idf, enc), vec_dir / "questions.rqav");

  RunConfig ext = base;
  ext.out_dir = work_dir("external_run").string();
  ext.encoder = "external";
  ext.answers_vec = (vec_dir / "answers.rqav").string();
  ext.questions_vec = (vec_dir / "questions.rqav").string();
  run_pipeline(ext);

  const std::string table = compare_reports(load_report(fs::path(base.out_dir) / "report.json"),
                                            load_report(fs::path(ext.out_dir) / "report.json"));
  const bool ok = table.find("## sentence") != std::string::npos &&
                  table.find("## paragraph") != std::string::npos &&
                  table.find("delta (B-A)") != std::string::npos &&
                  table.find("B: exact/external") != std::string::npos;
  if (ok) {
    pass("6a external-vectors", "external vectors evaluated and compared against the "
                                "built-in encoder");
  } else {
    fail("6a external-vectors", "comparison table missing expected sections");
  }
}

void criterion_6b(const std::optional<Task>& squad_task) {
  if (!squad_task) {
    skip("6b retrieval-quality", kSquadHint);
    return;
  }
  const Task& task = *squad_task;
  const auto t0 = Clock::now();
  const HashEncoderConfig enc;  // documented defaults
  const IdfTable idf = fit_idf(task, enc);
  const EmbeddingMatrix answers = encode_all_answers(task, idf, enc);
  const EmbeddingMatrix questions = encode_all_questions(task, idf, enc);
  const double encode_s = seconds_since(t0);

  const EvalRun run = evaluate_dense(task, answers, questions);
  const double total_s = seconds_since(t0);

  // Random-ranking baseline for a single gold among n candidates:
  // E[1/rank] = H_n / n. The bar is 50x that.
  const double n = static_cast<double>(task.candidates.size());
  double harmonic = 0.0;
  for (size_t i = 1; i <= task.candidates.size(); ++i) harmonic += 1.0 / double(i);
  const double threshold = 50.0 * harmonic / n;

  const double sentence_mrr = run.sentence.overall.mrr;
  const std::string detail =
      "sentence MRR=" + fmt(sentence_mrr, "%.4f") + " (threshold " + fmt(threshold) +
      "), paragraph MRR=" + fmt(run.paragraph.overall.mrr, "%.4f") + ", any@10=" +
      fmt(run.sentence.overall.r_at_any[2], "%.4f") + ", encode=" + fmt(encode_s, "%.0f") +
      "s total=" + fmt(total_s, "%.0f") + "s";
  if (sentence_mrr >= threshold && total_s < 7200.0) {
    pass("6b retrieval-quality", detail);
  } else {
    fail("6b retrieval-quality", detail + " (want MRR >= " + fmt(threshold) + ", time < 2h)");
  }
}

void criterion_7() {
  const fs::path data = fs::path(REQA_TEST_DATA) / "mini" / "mini_squad.json";
  RunConfig one;
  one.input = data.string();
  one.out_dir = work_dir("threads_1").string();
  one.use_bm25 = true;
  one.use_ivf = true;
  one.clusters = 6;
  one.threads = 1;
  RunConfig four = one;
  four.out_dir = work_dir("threads_4").string();
  four.threads = 4;

  run_pipeline(one);
  run_pipeline(four);

  std::string diffs;
  for (const char* name : {"report.json", "report.md", "stats.json", "answers.rqav",
                           "questions.rqav", "ivf.bin", "task/gold.jsonl"}) {
    const std::string a = slurp(fs::path(one.out_dir) / name);
    const std::string b = slurp(fs::path(four.out_dir) / name);
    if (a.empty() || a != b) diffs += std::string(" ") + name;
  }
  if (diffs.empty()) {
    pass("7 thread-determinism", "reports and artifacts byte-identical at 1 vs 4 threads");
  } else {
    fail("7 thread-determinism", "artifacts differ:" + diffs);
  }
}

template <typename F>
void guarded(const char* id, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    fail(id, std::string("unexpected error: ") + e.detail());
  } catch (const std::exception& e) {
    fail(id, std::string("unexpected exception: ") + e.what());
  }
}

}  // namespace

int main() {
  std::optional<Task> squad_task;
  guarded("1+2 squad", [&] { criterion_1_and_2_and_6b(squad_task); });
  guarded("3 evaluator-oracle", [] { criterion_3(); });
  guarded("4 bm25-fixture", [] { criterion_4(); });
  guarded("5 ann-recall", [] { criterion_5(); });
  guarded("6a external-vectors", [] { criterion_6a(); });
  guarded("6b retrieval-quality", [&] { criterion_6b(squad_task); });
  guarded("7 thread-determinism", [] { criterion_7(); });

  std::printf("acceptance: %d passed, %d failed, %d skipped\n", g_passed, g_failed, g_skipped);
  return g_failed > 0 ? 1 : 0;
}
