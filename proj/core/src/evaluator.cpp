#include "reqa/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "reqa/dot.hpp"
#include "reqa/error.hpp"
#include "reqa/parallel.hpp"

namespace reqa {
namespace {

constexpr uint32_t kMaxPoint = kRecallPoints.back();

// The deterministic total order: higher score first, then lower id.
bool beats(double s1, uint32_t i1, double s2, uint32_t i2) {
  if (s1 != s2) return s1 > s2;
  return i1 < i2;
}

struct TopEntry {
  double score = 0.0;
  uint32_t tie = 0;    // id that breaks score ties (always globally unique)
  uint32_t value = 0;  // what the ranking is over (candidate id or paragraph ordinal)
};

// Bounded best-first list; enough for the largest recall point.
struct TopList {
  std::array<TopEntry, kMaxPoint> items;
  uint32_t size = 0;

  void clear() { size = 0; }

  void insert(double score, uint32_t tie, uint32_t value) {
    uint32_t n = size;
    if (n == items.size()) {
      const TopEntry& worst = items[n - 1];
      if (!beats(score, tie, worst.score, worst.tie)) return;
      --n;
    }
    uint32_t pos = n;
    while (pos > 0 && beats(score, tie, items[pos - 1].score, items[pos - 1].tie)) --pos;
    for (uint32_t k = n; k > pos; --k) items[k] = items[k - 1];
    items[pos] = {score, tie, value};
    if (size < items.size()) ++size;
  }
};

struct QuestionOutcome {
  double rr = 0.0;
  std::array<double, 3> lit{};
  std::array<double, 3> any{};
};

// |top_N ∩ gold| walked off a TopList; gold must be sorted.
QuestionOutcome finish_question(uint64_t first_rank, const TopList& top,
                                std::span<const uint32_t> gold) {
  QuestionOutcome out;
  if (first_rank > 0) out.rr = 1.0 / static_cast<double>(first_rank);
  uint32_t hits = 0;
  size_t point = 0;
  for (uint32_t r = 0; r < top.size && point < kRecallPoints.size(); ++r) {
    if (std::binary_search(gold.begin(), gold.end(), top.items[r].value)) ++hits;
    while (point < kRecallPoints.size() && r + 1 == kRecallPoints[point]) {
      out.lit[point] = static_cast<double>(hits) / static_cast<double>(gold.size());
      out.any[point] = hits > 0 ? 1.0 : 0.0;
      ++point;
    }
  }
  // Pool (or probed subset) smaller than a recall point: the tail keeps the
  // final hit count.
  for (; point < kRecallPoints.size(); ++point) {
    out.lit[point] = static_cast<double>(hits) / static_cast<double>(gold.size());
    out.any[point] = hits > 0 ? 1.0 : 0.0;
  }
  return out;
}

constexpr size_t kTypeCount = std::size(kQuestionTypes);

struct Sums {
  double rr = 0.0;
  std::array<double, 3> lit{}, any{};
  uint64_t n = 0;

  void add(const QuestionOutcome& q) {
    rr += q.rr;
    ++n;
    for (size_t i = 0; i < 3; ++i) {
      lit[i] += q.lit[i];
      any[i] += q.any[i];
    }
  }

  MetricBundle bundle() const {
    MetricBundle b;
    b.n_questions = n;
    const double d = static_cast<double>(n);
    b.mrr = rr / d;
    for (size_t i = 0; i < 3; ++i) {
      b.r_at[i] = lit[i] / d;
      b.r_at_any[i] = any[i] / d;
    }
    return b;
  }
};

// The per-question outcomes are folded in one linear pass in question-id
// order, so the report is a pure function of the outcome array: identical
// at any thread count, and reproducible by any evaluator that ranks the
// same way, addition for addition.
EvalReport assemble(std::string granularity, const std::vector<QuestionOutcome>& outcomes,
                    const std::vector<TaskQuestion>& questions, uint64_t pool,
                    std::map<std::string, std::string> config) {
  Sums total;
  std::array<Sums, kTypeCount> by_type;
  for (size_t q = 0; q < outcomes.size(); ++q) {
    total.add(outcomes[q]);
    by_type[static_cast<uint8_t>(questions[q].type)].add(outcomes[q]);
  }

  EvalReport report;
  report.granularity = std::move(granularity);
  report.n_candidates = pool;
  report.config = std::move(config);
  report.overall = total.bundle();
  for (size_t t = 0; t < kTypeCount; ++t)
    if (by_type[t].n > 0)
      report.by_type.emplace_back(to_string(kQuestionTypes[t]), by_type[t].bundle());
  for (uint32_t point : kRecallPoints)
    if (point > pool) report.clamped.push_back(point);
  return report;
}

struct GoldKey {
  double score = 0.0;
  uint32_t tie = 0;
  bool present = false;
  uint64_t count = 0;  // entries beating this key
};

}  // namespace

ScoreMatrix score_all(const EmbeddingMatrix& questions, const EmbeddingMatrix& answers,
                      unsigned threads) {
  validate_matrix(questions);
  validate_matrix(answers);
  if (questions.dim != answers.dim)
    throw Error(errc::dimension_mismatch,
                "question dim " + std::to_string(questions.dim) + " vs answer dim " +
                    std::to_string(answers.dim));
  ScoreMatrix s;
  s.rows = questions.rows();
  s.cols = answers.rows();
  s.data.resize(s.rows * s.cols);
  parallel_chunks(s.rows, 8, threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i)
      for (size_t j = 0; j < s.cols; ++j) s.data[i * s.cols + j] = dot(questions.row(i), answers.row(j));
  });
  return s;
}

GoldRanks rank_gold(std::span<const double> scores, std::span<const uint32_t> gold) {
  if (gold.empty()) throw Error(errc::empty_input, "gold set is empty");
  for (uint32_t g : gold)
    if (g >= scores.size())
      throw Error(errc::range_error, "gold id " + std::to_string(g) + " outside the score vector");

  GoldRanks result;
  result.ranks.assign(gold.size(), 1);
  for (uint32_t j = 0; j < scores.size(); ++j)
    for (size_t k = 0; k < gold.size(); ++k)
      if (j != gold[k] && beats(scores[j], j, scores[gold[k]], gold[k])) ++result.ranks[k];
  result.first = *std::min_element(result.ranks.begin(), result.ranks.end());
  return result;
}

double mrr(std::span<const uint64_t> first_ranks) {
  if (first_ranks.empty()) throw Error(errc::empty_input, "no ranks to average");
  double sum = 0.0;
  for (uint64_t r : first_ranks) {
    if (r == 0) throw Error(errc::invalid_argument, "ranks are 1-based");
    sum += 1.0 / static_cast<double>(r);
  }
  return sum / static_cast<double>(first_ranks.size());
}

double recall_at_n(const std::vector<std::vector<uint32_t>>& ranked,
                   const std::vector<std::vector<uint32_t>>& gold, uint32_t n, bool any_hit) {
  if (n == 0) throw Error(errc::invalid_argument, "recall point must be at least 1");
  if (ranked.size() != gold.size())
    throw Error(errc::invalid_argument, "ranked lists and gold sets differ in question count");
  if (ranked.empty()) throw Error(errc::empty_input, "no questions to average");

  double sum = 0.0;
  for (size_t q = 0; q < ranked.size(); ++q) {
    if (gold[q].empty()) throw Error(errc::empty_input, "gold set is empty");
    std::vector<uint32_t> sorted_gold(gold[q].begin(), gold[q].end());
    std::sort(sorted_gold.begin(), sorted_gold.end());
    const size_t take = std::min<size_t>(n, ranked[q].size());
    uint32_t hits = 0;
    for (size_t r = 0; r < take; ++r)
      if (std::binary_search(sorted_gold.begin(), sorted_gold.end(), ranked[q][r])) ++hits;
    sum += any_hit ? (hits > 0 ? 1.0 : 0.0)
                   : static_cast<double>(hits) / static_cast<double>(sorted_gold.size());
  }
  return sum / static_cast<double>(ranked.size());
}

std::vector<uint32_t> dedup_to_paragraphs(std::span<const uint32_t> ranked_sentences,
                                          std::span<const uint32_t> paragraph_of) {
  std::vector<uint32_t> out;
  std::unordered_set<uint32_t> seen;
  for (uint32_t id : ranked_sentences) {
    if (id >= paragraph_of.size())
      throw Error(errc::range_error,
                  "candidate " + std::to_string(id) + " has no paragraph mapping");
    const uint32_t p = paragraph_of[id];
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

EvalRun evaluate_dense(const Task& task, const EmbeddingMatrix& answers,
                       const EmbeddingMatrix& questions, const EvalOptions& options) {
  if (task.questions.empty()) throw Error(errc::empty_input, "task has no questions");
  if (task.candidates.empty()) throw Error(errc::empty_input, "task has no candidates");
  validate_matrix(answers);
  validate_matrix(questions);
  if (answers.dim != questions.dim)
    throw Error(errc::dimension_mismatch, "answer dim " + std::to_string(answers.dim) +
                                              " vs question dim " + std::to_string(questions.dim));
  if (answers.rows() != task.candidates.size())
    throw Error(errc::manifest_mismatch,
                "answer matrix holds " + std::to_string(answers.rows()) + " rows for " +
                    std::to_string(task.candidates.size()) + " candidates");
  if (questions.rows() != task.questions.size())
    throw Error(errc::manifest_mismatch,
                "question matrix holds " + std::to_string(questions.rows()) + " rows for " +
                    std::to_string(task.questions.size()) + " questions");
  for (size_t i = 0; i < answers.manifest.size(); ++i)
    if (answers.manifest[i] != std::to_string(i))
      throw Error(errc::manifest_mismatch, "answer manifest row " + std::to_string(i) +
                                               " is '" + answers.manifest[i] +
                                               "', expected candidate id order");
  for (size_t i = 0; i < questions.manifest.size(); ++i)
    if (questions.manifest[i] != std::to_string(i))
      throw Error(errc::manifest_mismatch, "question manifest row " + std::to_string(i) +
                                               " is '" + questions.manifest[i] +
                                               "', expected question id order");
  if (options.ann && options.ann->dim != answers.dim)
    throw Error(errc::dimension_mismatch, "ivf index dim does not match the matrices");

  const size_t n_candidates = task.candidates.size();
  const size_t n_paragraphs = task.paragraphs.size();

  std::vector<uint32_t> pord_of(n_candidates);
  for (size_t j = 0; j < n_candidates; ++j) {
    pord_of[j] = task.candidates[j].paragraph_ord;
    if (j > 0 && pord_of[j] < pord_of[j - 1])
      throw Error(errc::validation_error, "candidates are not grouped by paragraph");
  }
  std::vector<uint32_t> first_candidate(n_paragraphs + 1, 0);
  for (size_t j = 0; j < n_candidates; ++j) ++first_candidate[pord_of[j] + 1];
  for (size_t p = 0; p < n_paragraphs; ++p) first_candidate[p + 1] += first_candidate[p];

  const size_t grain = 32;
  std::vector<QuestionOutcome> outcome_s(task.questions.size()), outcome_p(task.questions.size());

  parallel_chunks(task.questions.size(), grain, options.threads, [&](size_t, size_t begin,
                                                                     size_t end) {
    std::vector<double> scores;
    std::vector<uint32_t> subset;
    std::vector<GoldKey> keys_s, keys_p;
    TopList top_s, top_p;

    for (size_t qi = begin; qi < end; ++qi) {
      const auto query = questions.row(qi);
      const std::vector<uint32_t>& gold_s = task.gold.candidates[qi];
      const std::vector<uint32_t>& gold_p = task.gold.paragraphs[qi];

      subset.clear();
      if (options.ann) {
        for (uint32_t c : select_probes(*options.ann, query, options.probes))
          subset.insert(subset.end(), options.ann->lists[c].begin(), options.ann->lists[c].end());
        std::sort(subset.begin(), subset.end());
      }
      const size_t m = options.ann ? subset.size() : n_candidates;
      auto id_at = [&](size_t t) { return options.ann ? subset[t] : static_cast<uint32_t>(t); };

      scores.resize(m);
      for (size_t t = 0; t < m; ++t) scores[t] = dot(query, answers.row(id_at(t)));

      // Gold sentence keys: score of each gold candidate, when probed.
      keys_s.assign(gold_s.size(), {});
      for (size_t k = 0; k < gold_s.size(); ++k) {
        const uint32_t g = gold_s[k];
        if (g >= n_candidates)
          throw Error(errc::range_error, "gold candidate " + std::to_string(g) + " out of range");
        if (options.ann) {
          const auto it = std::lower_bound(subset.begin(), subset.end(), g);
          if (it == subset.end() || *it != g) continue;
          keys_s[k] = {scores[static_cast<size_t>(it - subset.begin())], g, true, 0};
        } else {
          keys_s[k] = {scores[g], g, true, 0};
        }
      }

      // Gold paragraph keys: best (score, id) within the paragraph's block.
      keys_p.assign(gold_p.size(), {});
      for (size_t k = 0; k < gold_p.size(); ++k) {
        const uint32_t p = gold_p[k];
        if (p >= n_paragraphs)
          throw Error(errc::range_error, "gold paragraph " + std::to_string(p) + " out of range");
        size_t lo, hi;
        if (options.ann) {
          lo = static_cast<size_t>(
              std::lower_bound(subset.begin(), subset.end(), first_candidate[p]) - subset.begin());
          hi = static_cast<size_t>(
              std::lower_bound(subset.begin(), subset.end(), first_candidate[p + 1]) -
              subset.begin());
        } else {
          lo = first_candidate[p];
          hi = first_candidate[p + 1];
        }
        for (size_t t = lo; t < hi; ++t) {
          const uint32_t j = id_at(t);
          if (!keys_p[k].present || beats(scores[t], j, keys_p[k].score, keys_p[k].tie))
            keys_p[k] = {scores[t], j, true, 0};
        }
      }

      // Counting pass: gold ranks and bounded top lists, both granularities.
      top_s.clear();
      top_p.clear();
      uint32_t block_pord = UINT32_MAX;
      double block_score = 0.0;
      uint32_t block_tie = 0;
      auto close_block = [&] {
        if (block_pord == UINT32_MAX) return;
        for (GoldKey& key : keys_p)
          if (key.present && beats(block_score, block_tie, key.score, key.tie)) ++key.count;
        top_p.insert(block_score, block_tie, block_pord);
      };
      for (size_t t = 0; t < m; ++t) {
        const uint32_t j = id_at(t);
        const double s = scores[t];
        for (GoldKey& key : keys_s)
          if (key.present && beats(s, j, key.score, key.tie)) ++key.count;
        top_s.insert(s, j, j);
        const uint32_t pord = pord_of[j];
        if (pord != block_pord) {
          close_block();
          block_pord = pord;
          block_score = s;
          block_tie = j;
        } else if (beats(s, j, block_score, block_tie)) {
          block_score = s;
          block_tie = j;
        }
      }
      close_block();

      uint64_t first_s = 0, first_p = 0;
      for (const GoldKey& key : keys_s)
        if (key.present && (first_s == 0 || key.count + 1 < first_s)) first_s = key.count + 1;
      for (const GoldKey& key : keys_p)
        if (key.present && (first_p == 0 || key.count + 1 < first_p)) first_p = key.count + 1;

      outcome_s[qi] = finish_question(first_s, top_s, gold_s);
      outcome_p[qi] = finish_question(first_p, top_p, gold_p);
    }
  });

  std::map<std::string, std::string> config{
      {"backend", options.ann ? "ivf" : "exact"},
      {"dim", std::to_string(answers.dim)},
      {"task_fingerprint", task.fingerprint_hex()},
  };
  if (options.ann) {
    uint32_t probes = options.probes == 0 ? options.ann->default_probes : options.probes;
    config["probes"] = std::to_string(std::min(probes, options.ann->k()));
    config["clusters"] = std::to_string(options.ann->k());
  }

  EvalRun run;
  run.sentence = assemble("sentence", outcome_s, task.questions, n_candidates, config);
  run.paragraph = assemble("paragraph", outcome_p, task.questions, n_paragraphs, config);
  return run;
}

EvalReport evaluate_bm25(const Task& task, const Bm25Index& index, unsigned threads) {
  if (task.questions.empty()) throw Error(errc::empty_input, "task has no questions");
  if (index.document_count() != task.paragraphs.size())
    throw Error(errc::invalid_argument,
                "bm25 index holds " + std::to_string(index.document_count()) +
                    " paragraphs, task has " + std::to_string(task.paragraphs.size()));

  const size_t n_paragraphs = task.paragraphs.size();
  const size_t grain = 64;
  std::vector<QuestionOutcome> outcomes(task.questions.size());

  parallel_chunks(task.questions.size(), grain, threads,
                  [&](size_t, size_t begin, size_t end) {
    std::vector<double> scores;
    std::vector<GoldKey> keys;
    TopList top;
    for (size_t qi = begin; qi < end; ++qi) {
      index.score_into(task.questions[qi].text, scores);
      const std::vector<uint32_t>& gold = task.gold.paragraphs[qi];
      keys.assign(gold.size(), {});
      for (size_t k = 0; k < gold.size(); ++k) {
        if (gold[k] >= n_paragraphs)
          throw Error(errc::range_error,
                      "gold paragraph " + std::to_string(gold[k]) + " out of range");
        keys[k] = {scores[gold[k]], gold[k], true, 0};
      }
      top.clear();
      for (uint32_t p = 0; p < scores.size(); ++p) {
        for (GoldKey& key : keys)
          if (beats(scores[p], p, key.score, key.tie)) ++key.count;
        top.insert(scores[p], p, p);
      }
      uint64_t first = 0;
      for (const GoldKey& key : keys)
        if (first == 0 || key.count + 1 < first) first = key.count + 1;
      outcomes[qi] = finish_question(first, top, gold);
    }
  });

  std::map<std::string, std::string> config{
      {"backend", "bm25"},
      {"k1", std::to_string(index.params().k1)},
      {"b", std::to_string(index.params().b)},
      {"task_fingerprint", task.fingerprint_hex()},
  };
  return assemble("paragraph", outcomes, task.questions, n_paragraphs, std::move(config));
}

}  // namespace reqa
