#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scout/embedding.hpp"

namespace scout {
namespace {

TEST(Similarity, IdenticalVectorsScoreOne) {
  Embedding v{0.6, 0.8};
  EXPECT_NEAR(similarity01(v, v), 1.0, 1e-9);
}

TEST(Similarity, OrthogonalVectorsScoreMidpoint) {
  EXPECT_NEAR(similarity01({1.0, 0.0}, {0.0, 1.0}), 0.5, 1e-9);
}

TEST(Similarity, AntipodalVectorsScoreZero) {
  EXPECT_NEAR(similarity01({1.0, 0.0}, {-1.0, 0.0}), 0.0, 1e-9);
}

TEST(Similarity, DimensionMismatchThrows) {
  try {
    similarity01({1.0, 0.0}, {1.0, 0.0, 0.0});
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(FallbackEmbedding, DeterministicAndUnitNorm) {
  Embedding a = fallback_embedding("certification frameworks in europe");
  Embedding b = fallback_embedding("certification frameworks in europe");
  EXPECT_EQ(a, b);
  EXPECT_TRUE(is_unit_norm(a));
  EXPECT_EQ(a.size(), kFallbackEmbeddingDim);
}

TEST(FallbackEmbedding, OrderInsensitiveBagOfWords) {
  Embedding a = fallback_embedding("alpha beta gamma");
  Embedding b = fallback_embedding("gamma alpha beta");
  EXPECT_EQ(a, b);
}

TEST(FallbackEmbedding, NonzeroForNonEmptyText) {
  for (const char* text : {"x", "!!!", "a b c", "   punctuation-only?!   ", "42"}) {
    Embedding e = fallback_embedding(text);
    EXPECT_GT(l2_norm(e), 0.0) << "text: " << text;
  }
}

TEST(FallbackEmbedding, SimilarTextsScoreHigherThanUnrelated) {
  Embedding q = fallback_embedding("italian export certification rules");
  Embedding close = fallback_embedding("certification rules for italian export goods");
  Embedding far = fallback_embedding("quantum chromodynamics lattice simulations");
  EXPECT_GT(similarity01(q, close), similarity01(q, far));
}

TEST(SimilarityProperty, AlwaysWithinUnitIntervalAndSymmetric) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Embedding a(8), b(8);
    for (auto& x : a) x = dist(rng);
    for (auto& x : b) x = dist(rng);
    double s = similarity01(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_DOUBLE_EQ(s, similarity01(b, a));
  }
}

}  // namespace
}  // namespace scout
