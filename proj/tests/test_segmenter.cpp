#include <doctest.h>

#include <string>
#include <vector>

#include "reqa/error.hpp"
#include "reqa/hashing.hpp"
#include "reqa/segmenter.hpp"
#include "reqa/text.hpp"

using namespace reqa;

namespace {

std::vector<std::string> texts(const std::vector<SentenceSpan>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) out.push_back(s.text);
  return out;
}

// Spans sorted, non-overlapping, text = code-point slice, and every
// non-whitespace byte of the context falls inside some span.
void check_invariants(std::string_view context, const std::vector<SentenceSpan>& spans) {
  uint32_t prev_end = 0;
  std::vector<bool> covered(utf8_length(context), false);
  for (const auto& s : spans) {
    REQUIRE(s.start >= prev_end);
    REQUIRE(s.start < s.end);
    const size_t b0 = utf8_byte_offset(context, s.start);
    const size_t b1 = utf8_byte_offset(context, s.end);
    CHECK(context.substr(b0, b1 - b0) == s.text);
    for (uint32_t cp = s.start; cp < s.end; ++cp) covered[cp] = true;
    prev_end = s.end;
  }
  size_t cp = 0;
  for (size_t i = 0; i < context.size();) {
    const unsigned char b = static_cast<unsigned char>(context[i]);
    const size_t len = b < 0x80 ? 1 : b < 0xE0 ? 2 : b < 0xF0 ? 3 : 4;
    const bool ws = len == 1 && (b == ' ' || b == '\t' || b == '\n' || b == '\r');
    if (!ws) CHECK(covered[cp]);
    i += len;
    ++cp;
  }
}

}  // namespace

TEST_SUITE("segmenter") {

TEST_CASE("two plain sentences") {
  const auto spans = split_sentences("It rained. We left.");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == SentenceSpan{0, 10, "It rained."});
  CHECK(spans[1] == SentenceSpan{11, 19, "We left."});
}

TEST_CASE("single sentence and degenerate input") {
  CHECK_THROWS_AS(split_sentences(""), Error);
  // Whitespace-only input degrades to a single covering span rather than
  // returning nothing (corpus validation rejects such contexts upstream).
  CHECK(split_sentences("   \n\t ").size() == 1);
  const auto spans = split_sentences("No terminal punctuation");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].text == "No terminal punctuation");
}

TEST_CASE("question and exclamation boundaries") {
  const auto spans = split_sentences("Really? Yes! Fine.");
  CHECK(texts(spans) == std::vector<std::string>{"Really?", "Yes!", "Fine."});
}

TEST_CASE("closing quotes and brackets stay with the sentence") {
  const auto spans = split_sentences("He said \"stop.\" Then he left.");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].text == "He said \"stop.\"");
  CHECK(spans[1].text == "Then he left.");

  const auto b = split_sentences("It worked (finally!) Everyone cheered.");
  REQUIRE(b.size() == 2);
  CHECK(b[0].text == "It worked (finally!)");
}

TEST_CASE("abbreviations do not split") {
  const auto spans = split_sentences("Dr. Chen arrived at St. Mary's. The ward was full.");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].text == "Dr. Chen arrived at St. Mary's.");

  const auto b = split_sentences("It holds approx. Forty grants are awarded.");
  // "approx." is on the suppression list even before an uppercase letter.
  CHECK(b.size() == 1);
}

TEST_CASE("single-letter initials do not split") {
  const auto spans = split_sentences("J. R. Hale founded it. Work began later.");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].text == "J. R. Hale founded it.");
}

TEST_CASE("decimals do not split; ellipses close a sentence") {
  const auto a = split_sentences("The mirror spans 3.5 metres. It is large.");
  REQUIRE(a.size() == 2);
  CHECK(a[0].text == "The mirror spans 3.5 metres.");

  const auto b = split_sentences("He paused... Then he spoke.");
  REQUIRE(b.size() == 2);
  CHECK(b[0].text == "He paused...");
}

TEST_CASE("lowercase continuation does not split") {
  const auto spans = split_sentences("It ran fast. but then it stopped");
  CHECK(spans.size() == 1);
}

TEST_CASE("digit after boundary opens a sentence") {
  const auto spans = split_sentences("Work ended. 1962 brought changes.");
  REQUIRE(spans.size() == 2);
  CHECK(spans[1].text == "1962 brought changes.");
}

TEST_CASE("offsets are code points, not bytes") {
  const std::string context = "Élan était là. Reste ici.";
  const auto spans = split_sentences(context);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 14);
  CHECK(spans[1].start == 15);
  CHECK(spans[0].text == "Élan était là.");
  CHECK(spans[1].text == "Reste ici.");
}

TEST_CASE("abbreviation table is lowercase and deduplicated") {
  const auto table = abbreviation_tokens();
  CHECK(table.size() > 10);
  for (size_t i = 0; i < table.size(); ++i) {
    for (char c : table[i]) CHECK((c == '.' || (c >= 'a' && c <= 'z')));
    for (size_t j = i + 1; j < table.size(); ++j) CHECK(table[i] != table[j]);
  }
}

TEST_CASE("invariants hold on fixture-like paragraphs") {
  const std::string_view paragraphs[] = {
      "The Aurora Observatory sits on Mount Hale at 2,804 metres. Dr. Elena "
      "Vásquez founded it in 1962 after a decade of surveys. Winter "
      "temperatures often fall below −30 ℃ on the summit.",
      "Really? Yes! He said \"stop.\" Then (quietly) he left... Nobody "
      "followed.",
      "One.",
      "e.g. this stays joined. Mr. Smith vs. Mrs. Jones et al. won.",
  };
  for (auto p : paragraphs) check_invariants(p, split_sentences(p));
}

TEST_CASE("invariants hold on synthesized paragraphs") {
  // Deterministic fuzz: random words, abbreviations, numbers, punctuation.
  const std::string_view words[] = {"river", "Hale",  "it",  "3.5", "Dr.", "—",
                                    "café",  "(note)", "No.", "run", "ST",  "1899"};
  const std::string_view enders[] = {". ", "! ", "? ", ".\" ", "?) ", "... "};
  SplitMix64 rng(2024);
  for (int iter = 0; iter < 300; ++iter) {
    std::string p;
    const int n_words = 1 + static_cast<int>(rng.next_below(40));
    for (int w = 0; w < n_words; ++w) {
      p += words[rng.next_below(std::size(words))];
      if (rng.next_below(5) == 0)
        p += enders[rng.next_below(std::size(enders))];
      else
        p += ' ';
    }
    check_invariants(p, split_sentences(p));
  }
}

TEST_CASE("locate_answer_sentence finds the covering sentence") {
  const std::string context = "It rained. We left.";
  const auto spans = split_sentences(context);
  const size_t len = utf8_length(context);
  CHECK(locate_answer_sentence(spans, 3, 6, len) == 0);   // "rained"
  CHECK(locate_answer_sentence(spans, 14, 4, len) == 1);  // "left"
  // Offset in the inter-sentence gap resolves forward.
  CHECK(locate_answer_sentence(spans, 10, 1, len) == 1);
  CHECK_THROWS_AS(locate_answer_sentence(spans, 19, 1, len), Error);
  CHECK_THROWS_AS(locate_answer_sentence(spans, 5, 100, len), Error);
}

TEST_CASE("locate_answer_sentence resolves trailing whitespace back") {
  const std::string context = "Stay here.   ";
  const auto spans = split_sentences(context);
  REQUIRE(spans.size() == 1);
  CHECK(locate_answer_sentence(spans, 11, 1, utf8_length(context)) == 0);
}

}  // TEST_SUITE
