#include "reqa/segmenter.hpp"

#include <algorithm>
#include <array>

#include "reqa/error.hpp"
#include "reqa/text.hpp"

namespace reqa {

namespace {

// Lowercase entries; multi-part abbreviations keep their inner dots. The
// trailing period of the abbreviation itself is not stored.
constexpr auto kAbbreviations = std::to_array<std::string_view>({
    // honorifics and titles
    "mr", "mrs", "ms", "dr", "prof", "rev", "hon", "fr", "pres", "gen", "sen", "rep", "gov",
    "col", "maj", "sgt", "lt", "capt", "cmdr", "jr", "sr",
    // months
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
    // latinisms and common truncations
    "e.g", "i.e", "etc", "cf", "vs", "al", "ca", "approx", "est",
    // institutions and places
    "st", "mt", "no", "inc", "ltd", "co", "corp", "dept", "univ", "u.s", "u.k", "u.n", "d.c",
    // degrees, eras, clock
    "ph.d", "m.d", "b.a", "m.a", "b.sc", "m.sc", "a.m", "p.m", "b.c", "a.d",
    // figures and citations
    "fig", "vol",
});

bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'”' || c == U'’' || c == U')' || c == U']';
}

bool is_open_quote(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'“' || c == U'‘';
}

bool is_upper(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  return c >= 0xC0 && c <= 0xDE && c != 0xD7;  // Latin-1 capitals, excluding multiplication sign
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_alpha(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }

bool starts_sentence(char32_t c) { return is_upper(c) || is_digit(c) || is_open_quote(c); }

// Token of letters and interior dots ending just before position `i` (the
// period under test). Lowercased. Empty if the period follows a non-letter.
std::string preceding_token(const std::u32string& points, size_t i) {
  size_t begin = i;
  while (begin > 0) {
    char32_t c = points[begin - 1];
    if (is_alpha(c) || c == U'.') {
      --begin;
    } else {
      break;
    }
  }
  while (begin < i && points[begin] == U'.') ++begin;  // drop leading dots (e.g. ellipsis residue)
  std::string token;
  token.reserve(i - begin);
  for (size_t k = begin; k < i; ++k) {
    char32_t c = points[k];
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
    token.push_back(static_cast<char>(c));
  }
  return token;
}

bool suppressed_period(const std::u32string& points, size_t i) {
  std::string token = preceding_token(points, i);
  if (token.empty()) return false;
  // single-letter initial ("J. Smith") — but a possessive tail ("Mary's.")
  // is not an initial: an initial starts at a word boundary, not after an
  // apostrophe.
  if (token.size() == 1 && is_alpha(points[i - 1])) {
    const bool after_apostrophe =
        i >= 2 && (points[i - 2] == U'\'' || points[i - 2] == U'’');
    if (!after_apostrophe) return true;
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end();
}

}  // namespace

std::span<const std::string_view> abbreviation_tokens() {
  return {kAbbreviations.data(), kAbbreviations.size()};
}

std::vector<SentenceSpan> split_sentences(std::string_view context) {
  if (context.empty()) {
    throw Error(errc::invalid_argument, "cannot split an empty context");
  }
  DecodedText decoded = decode_utf8(context);
  const std::u32string& points = decoded.points;
  const size_t n = points.size();

  std::vector<SentenceSpan> spans;
  constexpr size_t kUnset = static_cast<size_t>(-1);
  size_t sentence_start = kUnset;
  size_t last_non_ws = kUnset;

  auto emit = [&](size_t begin, size_t end) {
    SentenceSpan span;
    span.start = static_cast<uint32_t>(begin);
    span.end = static_cast<uint32_t>(end);
    span.text = std::string(decoded.slice(context, begin, end));
    spans.push_back(std::move(span));
  };

  for (size_t i = 0; i < n; ++i) {
    char32_t c = points[i];
    if (!is_ascii_space(c)) {
      if (sentence_start == kUnset) sentence_start = i;
      last_non_ws = i;
    }
    if (sentence_start == kUnset || !is_terminator(c)) continue;

    size_t j = i + 1;
    while (j < n && is_closer(points[j])) ++j;
    if (j >= n) break;  // end of text closes the final span below
    if (!is_ascii_space(points[j])) continue;
    size_t k = j;
    while (k < n && is_ascii_space(points[k])) ++k;
    if (k < n && !starts_sentence(points[k])) continue;
    if (c == U'.' && suppressed_period(points, i)) continue;

    emit(sentence_start, j);
    sentence_start = kUnset;
    last_non_ws = kUnset;
    i = j;  // loop increment moves past the whitespace
  }

  if (sentence_start != kUnset) {
    emit(sentence_start, last_non_ws + 1);
  }
  if (spans.empty()) {
    // whitespace-only context: one span over the whole string
    emit(0, n);
  }
  return spans;
}

size_t locate_answer_sentence(const std::vector<SentenceSpan>& spans, uint32_t answer_start,
                              uint32_t answer_len, size_t context_length) {
  if (spans.empty()) {
    throw Error(errc::invalid_argument, "no sentence spans given");
  }
  if (answer_start >= context_length) {
    throw Error(errc::range_error, "answer_start " + std::to_string(answer_start) +
                                       " is outside a context of length " + std::to_string(context_length));
  }
  if (static_cast<size_t>(answer_start) + answer_len > context_length) {
    throw Error(errc::range_error, "answer span [" + std::to_string(answer_start) + ", " +
                                       std::to_string(answer_start + answer_len) +
                                       ") exceeds context length " + std::to_string(context_length));
  }
  for (size_t idx = 0; idx < spans.size(); ++idx) {
    if (answer_start < spans[idx].end) return idx;
  }
  return spans.size() - 1;  // trailing whitespace clamps to the last sentence
}

}  // namespace reqa
