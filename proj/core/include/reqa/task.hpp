#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "reqa/corpus.hpp"

namespace reqa {

/// Positional paragraph identity: (article index, paragraph index).
struct ParagraphId {
  uint32_t article = 0;
  uint32_t paragraph = 0;

  auto operator<=>(const ParagraphId&) const = default;
  std::string str() const { return std::to_string(article) + ":" + std::to_string(paragraph); }
};

/// One answer candidate: a sentence plus the paragraph it came from.
/// candidate_id is the row index into the answer embedding matrix.
struct Candidate {
  uint32_t candidate_id = 0;
  std::string sentence;
  uint32_t paragraph_ord = 0;  // dense paragraph ordinal, row into Task::paragraphs
  ParagraphId paragraph_id;
  uint32_t sentence_index = 0;  // within the paragraph
  bool operator==(const Candidate&) const = default;
};

enum class QuestionType : uint8_t { what, who, how, when, which, where, why, other };

inline constexpr QuestionType kQuestionTypes[] = {
    QuestionType::what, QuestionType::who,   QuestionType::how, QuestionType::when,
    QuestionType::which, QuestionType::where, QuestionType::why, QuestionType::other,
};

const char* to_string(QuestionType type);

/// Leading question-type word, with an optional preposition skipped before
/// "what"/"which" ("In which year..." -> which). Anything else is `other`.
QuestionType classify_question(std::string_view question_text);

struct TaskQuestion {
  uint32_t question_id = 0;  // dense, row into the question embedding matrix
  std::string source_id;
  std::string text;
  QuestionType type = QuestionType::other;
  bool operator==(const TaskQuestion&) const = default;
};

/// Paragraph context store, indexed by paragraph ordinal.
struct ParagraphEntry {
  ParagraphId id;
  std::string article_title;
  std::string context;
  bool operator==(const ParagraphEntry&) const = default;
};

/// Per-question correct answers: candidate ids at sentence granularity and
/// paragraph ordinals at paragraph granularity. Sets are sorted and unique;
/// duplicate questions (identical normalized text) share merged sets.
struct GoldMap {
  std::vector<std::vector<uint32_t>> candidates;
  std::vector<std::vector<uint32_t>> paragraphs;
  bool operator==(const GoldMap&) const = default;
};

/// The candidate sentence store: every sentence of every paragraph, in
/// (article, paragraph, sentence) order.
struct AnswerIndex {
  std::vector<ParagraphEntry> paragraphs;  // by paragraph ordinal
  std::vector<Candidate> candidates;       // by candidate id
  bool operator==(const AnswerIndex&) const = default;
};

/// A fully constructed retrieval task.
struct Task {
  std::string source_name;
  std::vector<ParagraphEntry> paragraphs;
  std::vector<Candidate> candidates;
  std::vector<TaskQuestion> questions;
  GoldMap gold;

  /// Content hash covering ids, texts, and gold sets. Reports carry it so
  /// artifacts from different tasks refuse to be compared.
  uint64_t fingerprint() const;
  std::string fingerprint_hex() const;
  bool operator==(const Task&) const = default;
};

AnswerIndex build_answer_index(const Corpus& corpus);
std::vector<TaskQuestion> extract_questions(const Corpus& corpus);

/// Maps every question's answer spans to candidate ids, then unions the
/// gold sets of questions whose normalized text coincides. An answer span
/// that cannot be mapped to a sentence raises validation_error naming the
/// question.
GoldMap build_gold_map(const Corpus& corpus, const AnswerIndex& index,
                       const std::vector<TaskQuestion>& questions);

Task build_task(const Corpus& corpus);

/// Task directory layout: task.json, paragraphs.jsonl, candidates.jsonl,
/// questions.jsonl, gold.jsonl.
void save_task(const Task& task, const std::filesystem::path& dir);
Task load_task(const std::filesystem::path& dir);

}  // namespace reqa
