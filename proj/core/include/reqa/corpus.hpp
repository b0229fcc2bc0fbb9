#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace reqa {

/// One answer occurrence. `start` is a code-point offset into the paragraph
/// context; `text` must equal the context slice at [start, start+len(text)).
struct AnswerSpan {
  uint32_t start = 0;
  std::string text;
  bool operator==(const AnswerSpan&) const = default;
};

struct QuestionRecord {
  std::string id;
  std::string text;
  std::vector<AnswerSpan> answers;  // never empty
  bool operator==(const QuestionRecord&) const = default;
};

struct Paragraph {
  std::string context;
  std::vector<QuestionRecord> qas;
  bool operator==(const Paragraph&) const = default;
};

struct Article {
  std::string title;
  std::vector<Paragraph> paragraphs;  // never empty
  bool operator==(const Article&) const = default;
};

/// Canonical ingested form of a SQuAD-style dataset. Immutable once built;
/// safe to share across threads.
struct Corpus {
  std::string source_name;
  std::vector<Article> articles;

  size_t question_count() const;
  size_t paragraph_count() const;
  bool operator==(const Corpus&) const = default;
};

/// Checks every Corpus invariant; throws validation_error naming the first
/// offending question or paragraph.
void validate(const Corpus& corpus);

/// Parses SQuAD 1.1 JSON. Malformed JSON raises parse_error with the byte
/// offset; a missing field raises schema_error with the JSON path; a span
/// that does not match its context raises validation_error with the
/// question id.
Corpus parse_squad(std::string_view json_text, std::string source_name = "squad");
Corpus load_squad_file(const std::filesystem::path& path, std::string source_name = "squad");

/// Serializes back to SQuAD 1.1 layout. parse_squad(to_squad_json(c)) == c.
std::string to_squad_json(const Corpus& corpus);

struct NqSpan {
  uint32_t start = 0;
  uint32_t length = 0;
};

/// One line of the simplified NQ intermediate (line-delimited JSON with
/// fields question, context, block_type, spans).
struct NqRecord {
  std::string question;
  std::string context;
  std::string block_type;  // "paragraph" | "list" | "table"; empty if missing
  bool has_block_type = false;
  std::vector<NqSpan> spans;
};

struct NqFilterSummary {
  size_t records_in = 0;
  size_t retained = 0;
  size_t dropped_multi_span = 0;
  size_t dropped_no_span = 0;
  size_t dropped_block_type = 0;
  size_t dropped_missing_block = 0;

  size_t dropped() const {
    return dropped_multi_span + dropped_no_span + dropped_block_type + dropped_missing_block;
  }
};

struct NqFilterResult {
  Corpus corpus;
  NqFilterSummary summary;
};

/// Keeps records with exactly one short-answer span inside a paragraph
/// block. Retained records become one paragraph with one question each,
/// grouped under a single synthetic article. A span outside the paragraph
/// text raises validation_error.
NqFilterResult filter_nq_records(std::string_view jsonl, std::string source_name = "nq");
NqFilterResult load_nq_file(const std::filesystem::path& path, std::string source_name = "nq");

}  // namespace reqa
