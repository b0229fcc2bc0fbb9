#include "reqa/text.hpp"

#include <algorithm>
#include <cctype>

#include "reqa/error.hpp"

namespace reqa {

const char* to_string(errc code) {
  switch (code) {
    case errc::parse_error: return "parse_error";
    case errc::schema_error: return "schema_error";
    case errc::validation_error: return "validation_error";
    case errc::range_error: return "range_error";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::bad_magic: return "bad_magic";
    case errc::bad_version: return "bad_version";
    case errc::truncated: return "truncated";
    case errc::manifest_mismatch: return "manifest_mismatch";
    case errc::non_finite: return "non_finite";
    case errc::empty_input: return "empty_input";
    case errc::invalid_argument: return "invalid_argument";
    case errc::fingerprint_mismatch: return "fingerprint_mismatch";
    case errc::io_error: return "io_error";
  }
  return "unknown_error";
}

DecodedText decode_utf8(std::string_view text) {
  DecodedText out;
  out.points.reserve(text.size());
  out.byte_of.reserve(text.size() + 1);
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    out.byte_of.push_back(static_cast<uint32_t>(i));
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6 && i + 1 < n) {
      cp = b0 & 0x1f;
      len = 2;
    } else if ((b0 >> 4) == 0xe && i + 2 < n) {
      cp = b0 & 0x0f;
      len = 3;
    } else if ((b0 >> 3) == 0x1e && i + 3 < n) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      out.points.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (size_t k = 1; k < len; ++k) {
      unsigned char bk = static_cast<unsigned char>(text[i + k]);
      if ((bk >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3f);
    }
    if (!ok) {
      out.points.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.points.push_back(cp);
    i += len;
  }
  out.byte_of.push_back(static_cast<uint32_t>(n));
  return out;
}

size_t utf8_length(std::string_view text) {
  size_t count = 0;
  for (size_t i = 0; i < text.size();) {
    unsigned char b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      i += 1;
    } else if ((b >> 5) == 0x6) {
      i += 2;
    } else if ((b >> 4) == 0xe) {
      i += 3;
    } else if ((b >> 3) == 0x1e) {
      i += 4;
    } else {
      i += 1;  // stray continuation byte
    }
    if (i > text.size()) i = text.size();
    ++count;
  }
  return count;
}

size_t utf8_byte_offset(std::string_view text, size_t cp) {
  size_t count = 0;
  size_t i = 0;
  while (i < text.size() && count < cp) {
    unsigned char b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      i += 1;
    } else if ((b >> 5) == 0x6) {
      i += 2;
    } else if ((b >> 4) == 0xe) {
      i += 3;
    } else if ((b >> 3) == 0x1e) {
      i += 4;
    } else {
      i += 1;
    }
    if (i > text.size()) i = text.size();
    ++count;
  }
  if (count != cp) {
    throw Error(errc::range_error, "code point offset " + std::to_string(cp) +
                                       " past end of text (length " + std::to_string(count) + ")");
  }
  return i;
}

namespace {

inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (is_word_byte(static_cast<unsigned char>(ch))) {
      current.push_back(ascii_lower(ch));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> token_types(std::string_view text) {
  std::vector<std::string> tokens = tokenize(text);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

std::string normalize_question(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    unsigned char b = static_cast<unsigned char>(ch);
    if (b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\f' || b == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(ascii_lower(ch));
  }
  while (!out.empty()) {
    char c = out.back();
    if (c == '?' || c == '!' || c == '.' || c == ',' || c == ';' || c == ':') {
      out.pop_back();
    } else {
      break;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

bool is_ascii_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

}  // namespace reqa
