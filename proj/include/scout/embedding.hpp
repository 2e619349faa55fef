#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scout/digest.hpp"
#include "scout/errors.hpp"

namespace scout {

using Embedding = std::vector<double>;

inline constexpr std::size_t kFallbackEmbeddingDim = 256;

inline double l2_norm(const Embedding& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

inline bool is_unit_norm(const Embedding& v, double tolerance = 1e-6) {
  if (v.empty()) return false;
  return std::abs(l2_norm(v) - 1.0) <= tolerance;
}

inline Embedding l2_normalize(Embedding v) {
  double norm = l2_norm(v);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

/// Deterministic hashed bag-of-words embedder: lowercase alphanumeric tokens,
/// each hashed into one of 256 buckets with a hash-derived sign, then
/// L2-normalized. Order-insensitive and never zero for non-empty text.
inline Embedding fallback_embedding(std::string_view text) {
  Embedding acc(kFallbackEmbeddingDim, 0.0);
  std::string token;
  bool any_token = false;
  auto flush = [&] {
    if (token.empty()) return;
    any_token = true;
    std::uint64_t h = fnv1a64(token);
    std::size_t index = static_cast<std::size_t>(h % kFallbackEmbeddingDim);
    double sign = ((h >> 32) & 1ULL) ? 1.0 : -1.0;
    acc[index] += sign;
    token.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();

  bool all_zero = std::all_of(acc.begin(), acc.end(), [](double x) { return x == 0.0; });
  if (!any_token || all_zero) {
    // Token collisions can cancel; pin one bucket so non-empty text always
    // yields a usable vector.
    acc[static_cast<std::size_t>(fnv1a64(text) % kFallbackEmbeddingDim)] = 1.0;
  }
  return l2_normalize(std::move(acc));
}

inline double cosine(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    raise(ErrorCode::DimensionMismatch,
          "embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
              std::to_string(b.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  double na = l2_norm(a);
  double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (na * nb);
}

/// Cosine mapped affinely onto [0,1] so opposed vectors stay distinguishable
/// from merely unrelated ones.
inline double similarity01(const Embedding& a, const Embedding& b) {
  double mapped = (cosine(a, b) + 1.0) / 2.0;
  return std::clamp(mapped, 0.0, 1.0);
}

}  // namespace scout
