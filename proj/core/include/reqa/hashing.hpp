#pragma once

#include <cstdint>
#include <string_view>

namespace reqa {

inline constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;
inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer. Spreads entropy across all output bits.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Seeded FNV-1a over the bytes of `s`, finalized with mix64. Platform
/// independent, so hashed artifacts reproduce across machines.
constexpr uint64_t hash64(std::string_view s, uint64_t seed = 0) {
  uint64_t h = kFnvOffset ^ mix64(seed);
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return mix64(h);
}

/// Minimal deterministic RNG (splitmix64 sequence). Used wherever seeded
/// randomness must be identical across standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform in [0, bound) by rejection-free multiply-shift. Slight modulo
  /// bias is irrelevant for sampling and shuffling at our sizes.
  uint64_t next_below(uint64_t bound) { return bound ? next() % bound : 0; }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

/// Incremental FNV-1a accumulator for fingerprinting structured content.
class Fingerprint {
 public:
  void add(std::string_view s) {
    for (char c : s) step(static_cast<unsigned char>(c));
    step(0xff);  // separator so {"ab","c"} != {"a","bc"}
  }
  void add(uint64_t v) {
    for (int i = 0; i < 8; ++i) step(static_cast<unsigned char>(v >> (8 * i)));
  }
  uint64_t value() const { return mix64(h_); }

 private:
  void step(unsigned char b) {
    h_ ^= b;
    h_ *= kFnvPrime;
  }
  uint64_t h_ = kFnvOffset;
};

}  // namespace reqa
