// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ragkit/embedding.hpp"
#include "ragkit/errors.hpp"

namespace ragkit::embedding {
namespace {

TEST(HashingEmbedder, Deterministic) {
  HashingEmbedder e;
  EXPECT_EQ(e.embed("abc"), e.embed("abc"));
  HashingEmbedder again;
  EXPECT_EQ(e.embed("abc"), again.embed("abc"));
}

TEST(HashingEmbedder, SingleTokenIsOneHot) {
  HashingEmbedder e(8);
  auto v = e.embed("x");
  ASSERT_EQ(v.dimension(), 8u);
  int nonzero = 0;
  for (double x : v.values()) {
    if (x != 0.0) {
      ++nonzero;
      EXPECT_DOUBLE_EQ(std::abs(x), 1.0);
    }
  }
  EXPECT_EQ(nonzero, 1);
  auto [bucket, sign] = e.slot("x");
  EXPECT_DOUBLE_EQ(v.values()[bucket], static_cast<double>(sign));
}

TEST(HashingEmbedder, UnitNormAndCaseInsensitive) {
  HashingEmbedder e(64);
  auto v = e.embed("The Girl From Monterrey");
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  EXPECT_EQ(v, e.embed("the girl from monterrey"));
}

TEST(HashingEmbedder, TokenOrderDoesNotMatter) {
  HashingEmbedder e(128);
  EXPECT_EQ(e.embed("alpha beta gamma"), e.embed("gamma alpha beta"));
}

TEST(HashingEmbedder, SeedChangesHashing) {
  HashingEmbedder a(256, 1), b(256, 2);
  bool differs = false;
  for (auto tok : {"alpha", "beta", "gamma", "delta", "epsilon"}) differs |= a.slot(tok) != b.slot(tok);
  EXPECT_TRUE(differs);
}

TEST(HashingEmbedder, EmptyTextThrows) {
  HashingEmbedder e;
  EXPECT_THROW(e.embed(""), EmptyTextError);
  EXPECT_THROW(e.embed("  ,;! "), EmptyTextError);
  EXPECT_THROW(HashingEmbedder(0), std::invalid_argument);
}

TEST(Cosine, SelfSimilarityIsExactlyOne) {
  HashingEmbedder e;
  for (auto t : {"a", "some title", "Jhuthi Sharm (1986 film)"}) {
    auto v = e.embed(t);
    EXPECT_EQ(cosine(v, v), 1.0);
  }
}

TEST(Cosine, MatchesBruteForceDotProduct) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(16), b(16);
    for (auto& x : a) x = nd(rng);
    for (auto& x : b) x = nd(rng);
    double na = 0, nb = 0, dot = 0;
    for (int i = 0; i < 16; ++i) {
      na += a[i] * a[i];
      nb += b[i] * b[i];
      dot += a[i] * b[i];
    }
    double expected = dot / std::sqrt(na) / std::sqrt(nb);
    double got = cosine(EmbeddingVector::normalized(a), EmbeddingVector::normalized(b));
    EXPECT_NEAR(got, expected, 1e-12);
    EXPECT_LE(got, 1.0);
    EXPECT_GE(got, -1.0);
  }
}

TEST(Cosine, DimensionMismatchThrows) {
  auto a = EmbeddingVector::normalized({1.0, 0.0});
  auto b = EmbeddingVector::normalized({1.0, 0.0, 0.0});
  EXPECT_THROW(cosine(a, b), DimensionMismatch);
  EXPECT_THROW(EmbeddingVector::normalized({0.0, 0.0}), EmptyTextError);
}

TEST(RemoteEmbedder, MissingKeyIsAuthError) {
  ::unsetenv("RAGKIT_TEST_NO_EMBED_KEY");
  RemoteEmbedderConfig cfg;
  cfg.endpoint_url = "http://127.0.0.1:9/v1/embeddings";
  cfg.api_key_env_var = "RAGKIT_TEST_NO_EMBED_KEY";
  EXPECT_THROW(RemoteEmbedder{cfg}, AuthError);
}

}  // namespace
}  // namespace ragkit::embedding
