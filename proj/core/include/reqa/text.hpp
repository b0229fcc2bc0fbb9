#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reqa {

/// A string decoded into Unicode scalar values with a map back to byte
/// offsets. All span arithmetic in the corpus model is in code points, not
/// bytes, matching the character-offset convention of the input data.
struct DecodedText {
  std::u32string points;
  std::vector<uint32_t> byte_of;  // byte_of[i] = byte offset of points[i]; has points.size()+1 entries

  size_t size() const { return points.size(); }

  /// UTF-8 slice covering code points [begin, end).
  std::string_view slice(std::string_view original, size_t begin, size_t end) const {
    return original.substr(byte_of[begin], byte_of[end] - byte_of[begin]);
  }
};

/// Decode UTF-8. Invalid byte sequences are consumed one byte at a time as
/// U+FFFD so that offsets stay total; well-formed input round-trips exactly.
DecodedText decode_utf8(std::string_view text);

/// Number of code points in `text`.
size_t utf8_length(std::string_view text);

/// Byte offset of code point index `cp` (cp may equal the length, giving the
/// byte length). Throws range_error past the end.
size_t utf8_byte_offset(std::string_view text, size_t cp);

/// Lowercased word tokens. Words are maximal runs of [0-9A-Za-z] plus any
/// non-ASCII bytes; everything else separates. ASCII letters are lowercased,
/// non-ASCII is kept as-is (no locale involvement).
std::vector<std::string> tokenize(std::string_view text);

/// Tokens of `tokenize` deduplicated and sorted: the token *types*.
std::vector<std::string> token_types(std::string_view text);

/// Key used to merge duplicate questions: lowercase, collapse internal
/// whitespace runs to one space, trim, strip trailing punctuation.
std::string normalize_question(std::string_view text);

bool is_ascii_space(char32_t c);

}  // namespace reqa
