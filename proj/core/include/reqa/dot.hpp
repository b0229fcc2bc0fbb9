#pragma once

#include <cstddef>
#include <span>

namespace reqa {

/// Dot product with four-lane double accumulation in a fixed order. Every
/// scoring path (exact, ANN, k-means) funnels through this kernel, so ranks
/// agree bit-for-bit across backends and thread counts.
inline double dot(std::span<const float> x, std::span<const float> y) {
  const size_t n = x.size();
  const float* a = x.data();
  const float* b = y.data();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * b[i];
    s1 += static_cast<double>(a[i + 1]) * b[i + 1];
    s2 += static_cast<double>(a[i + 2]) * b[i + 2];
    s3 += static_cast<double>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * b[i];
  return (s0 + s1) + (s2 + s3);
}

/// Squared Euclidean distance, same accumulation discipline as dot().
inline double squared_distance(std::span<const float> x, std::span<const float> y) {
  const size_t n = x.size();
  const float* a = x.data();
  const float* b = y.data();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    double d0 = static_cast<double>(a[i]) - b[i];
    double d1 = static_cast<double>(a[i + 1]) - b[i + 1];
    double d2 = static_cast<double>(a[i + 2]) - b[i + 2];
    double d3 = static_cast<double>(a[i + 3]) - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    double d = static_cast<double>(a[i]) - b[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

}  // namespace reqa
