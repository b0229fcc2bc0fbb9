#include "reqa/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "reqa/error.hpp"
#include "reqa/parallel.hpp"
#include "reqa/text.hpp"

namespace reqa {
namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

struct Partial {
  Moments question, answer, coverage;
  std::array<uint64_t, std::size(kQuestionTypes)> type_count{};
};

double mean_of(const Moments& m, double n) { return m.sum / n; }

double stddev_of(const Moments& m, double n) {
  const double mean = m.sum / n;
  const double var = m.sum_sq / n - mean * mean;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

// Set intersection size of two sorted unique token lists.
size_t overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    const int c = a[i].compare(b[j]);
    if (c == 0) {
      ++n;
      ++i;
      ++j;
    } else if (c < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

DatasetStats compute_stats(const Task& task, unsigned threads) {
  if (task.questions.empty()) throw Error(errc::empty_input, "task has no questions");
  if (task.candidates.empty()) throw Error(errc::empty_input, "task has no candidates");

  const size_t grain = 64;
  const size_t chunks = chunk_count(task.questions.size(), grain);
  std::vector<Partial> partials(chunks);

  parallel_chunks(task.questions.size(), grain, threads,
                  [&](size_t chunk, size_t begin, size_t end) {
    Partial& part = partials[chunk];
    for (size_t qi = begin; qi < end; ++qi) {
      const TaskQuestion& q = task.questions[qi];
      part.question.add(static_cast<double>(tokenize(q.text).size()));
      ++part.type_count[static_cast<size_t>(q.type)];

      const std::vector<std::string> q_types = token_types(q.text);
      double answer_sum = 0.0, coverage_sum = 0.0;
      const std::vector<uint32_t>& gold = task.gold.candidates[qi];
      for (uint32_t g : gold) {
        const std::string& sentence = task.candidates[g].sentence;
        answer_sum += static_cast<double>(tokenize(sentence).size());
        if (!q_types.empty()) {
          const std::vector<std::string> s_types = token_types(sentence);
          coverage_sum += 100.0 * static_cast<double>(overlap(q_types, s_types)) /
                          static_cast<double>(q_types.size());
        }
      }
      const double n_gold = static_cast<double>(gold.size());
      part.answer.add(answer_sum / n_gold);
      part.coverage.add(coverage_sum / n_gold);
    }
  });

  Partial total;
  for (const Partial& p : partials) {
    total.question.merge(p.question);
    total.answer.merge(p.answer);
    total.coverage.merge(p.coverage);
    for (size_t t = 0; t < total.type_count.size(); ++t) total.type_count[t] += p.type_count[t];
  }

  DatasetStats stats;
  stats.n_questions = task.questions.size();
  stats.n_candidates = task.candidates.size();
  stats.n_paragraphs = task.paragraphs.size();
  const double n = static_cast<double>(stats.n_questions);
  stats.question_tokens_mean = mean_of(total.question, n);
  stats.question_tokens_stddev = stddev_of(total.question, n);
  stats.answer_tokens_mean = mean_of(total.answer, n);
  stats.answer_tokens_stddev = stddev_of(total.answer, n);
  stats.coverage_mean = mean_of(total.coverage, n);
  stats.coverage_stddev = stddev_of(total.coverage, n);
  for (size_t t = 0; t < std::size(kQuestionTypes); ++t)
    stats.type_percent.emplace_back(to_string(kQuestionTypes[t]),
                                    100.0 * static_cast<double>(total.type_count[t]) / n);
  return stats;
}

std::string stats_to_json(const DatasetStats& stats) {
  nlohmann::json j{
      {"n_questions", stats.n_questions},
      {"n_candidates", stats.n_candidates},
      {"n_paragraphs", stats.n_paragraphs},
      {"question_tokens",
       {{"mean", stats.question_tokens_mean}, {"stddev", stats.question_tokens_stddev}}},
      {"answer_tokens",
       {{"mean", stats.answer_tokens_mean}, {"stddev", stats.answer_tokens_stddev}}},
      {"coverage_percent", {{"mean", stats.coverage_mean}, {"stddev", stats.coverage_stddev}}},
  };
  nlohmann::json types = nlohmann::json::object();
  for (const auto& [name, pct] : stats.type_percent) types[name] = pct;
  j["type_percent"] = types;
  return j.dump(2) + "\n";
}

std::string stats_to_markdown(const DatasetStats& stats) {
  std::string out = "# Dataset statistics\n\n";
  out += "| | count |\n|---|---|\n";
  out += "| questions | " + std::to_string(stats.n_questions) + " |\n";
  out += "| candidate sentences | " + std::to_string(stats.n_candidates) + " |\n";
  out += "| candidate paragraphs | " + std::to_string(stats.n_paragraphs) + " |\n";

  out += "\n| statistic | mean | stddev |\n|---|---|---|\n";
  out += "| question tokens | " + fmt1(stats.question_tokens_mean) + " | " +
         fmt1(stats.question_tokens_stddev) + " |\n";
  out += "| answer tokens | " + fmt1(stats.answer_tokens_mean) + " | " +
         fmt1(stats.answer_tokens_stddev) + " |\n";
  out += "| query coverage (%) | " + fmt1(stats.coverage_mean) + " | " +
         fmt1(stats.coverage_stddev) + " |\n";

  out += "\n| type | % |\n|---|---|\n";
  for (const auto& [name, pct] : stats.type_percent)
    out += "| " + name + " | " + fmt1(pct) + " |\n";
  return out;
}

}  // namespace reqa
