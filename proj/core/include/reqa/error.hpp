#pragma once

#include <stdexcept>
#include <string>

namespace reqa {

/// Failure categories surfaced by the library. Each maps to a stable string
/// used in machine-readable error output.
enum class errc {
  parse_error,
  schema_error,
  validation_error,
  range_error,
  dimension_mismatch,
  bad_magic,
  bad_version,
  truncated,
  manifest_mismatch,
  non_finite,
  empty_input,
  invalid_argument,
  fingerprint_mismatch,
  io_error,
};

const char* to_string(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  errc code() const noexcept { return code_; }

  /// The message without the error-code prefix, for re-wrapping.
  const std::string& detail() const noexcept { return detail_; }

 private:
  errc code_;
  std::string detail_;
};

}  // namespace reqa
