#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reqa {

/// One sentence of a paragraph context. Offsets are code-point indices into
/// the context; `text` is the UTF-8 slice at [start, end). Spans within a
/// paragraph are sorted, non-overlapping, and jointly cover every
/// non-whitespace character of the context.
struct SentenceSpan {
  uint32_t start = 0;
  uint32_t end = 0;
  std::string text;
  bool operator==(const SentenceSpan&) const = default;
};

/// Rule-based sentence splitter. Boundaries are {. ! ?} (plus any trailing
/// closing quotes/brackets) followed by whitespace and an uppercase letter,
/// digit, or opening quote. Periods after known abbreviations or
/// single-letter initials do not split. Deterministic; no locale input.
std::vector<SentenceSpan> split_sentences(std::string_view context);

/// Index of the sentence containing `answer_start`. An offset falling in
/// inter-sentence whitespace resolves to the following sentence; an offset
/// in trailing whitespace resolves to the last sentence. Throws range_error
/// if the answer lies outside the context of `context_length` code points.
size_t locate_answer_sentence(const std::vector<SentenceSpan>& spans, uint32_t answer_start,
                              uint32_t answer_len, size_t context_length);

/// The splitter's period-suppression tokens (lowercase, dots retained for
/// multi-part abbreviations such as "e.g"). Exposed for table-driven tests.
std::span<const std::string_view> abbreviation_tokens();

}  // namespace reqa
