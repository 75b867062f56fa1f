// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ragkit/retry.hpp"

namespace ragkit::embedding {

// Unit-norm vector. Construct through normalized() or an Embedder.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // L2-normalizes `raw`; throws EmptyTextError if it is all zeros.
  static EmbeddingVector normalized(std::vector<double> raw);

  const std::vector<double>& values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }
  double norm() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

// Dot product of unit vectors, clamped to [-1, 1]. Identical vectors give
// exactly 1. Throws DimensionMismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  // Throws EmptyTextError when `text` has no content.
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
};

// Signed feature hashing over lowercase word tokens. Pure function of
// (text, dimension, seed).
class HashingEmbedder : public Embedder {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed0f5eed0f5eedULL;

  explicit HashingEmbedder(std::size_t dimension = 256, std::uint64_t seed = kDefaultSeed);

  EmbeddingVector embed(std::string_view text) const override;
  std::size_t dimension() const override { return dim_; }

  // Bucket index and sign (+1/-1) a token hashes to.
  std::pair<std::size_t, int> slot(std::string_view token) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

struct RemoteEmbedderConfig {
  std::string endpoint_url;  // OpenAI-compatible /v1/embeddings
  std::string api_key_env_var;
  std::string model_id = "text-embedding-3-small";
  std::size_t dimension = 1536;
  int max_retries = 2;
  int retry_backoff_ms = 500;
  int timeout_ms = 30000;
};

class RemoteEmbedder : public Embedder {
 public:
  // Throws AuthError if the key variable is unset.
  explicit RemoteEmbedder(RemoteEmbedderConfig cfg);
  EmbeddingVector embed(std::string_view text) const override;
  std::size_t dimension() const override { return cfg_.dimension; }

 private:
  RemoteEmbedderConfig cfg_;
  std::string api_key_;
};

}  // namespace ragkit::embedding
