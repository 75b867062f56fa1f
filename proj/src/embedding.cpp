// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/embedding.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "http_client.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit::embedding {

EmbeddingVector EmbeddingVector::normalized(std::vector<double> raw) {
  double sq = 0.0;
  for (double v : raw) sq += v * v;
  if (sq == 0.0) throw EmptyTextError("cannot normalize a zero vector");
  double n = std::sqrt(sq);
  for (double& v : raw) v /= n;
  EmbeddingVector out;
  out.values_ = std::move(raw);
  return out;
}

double EmbeddingVector::norm() const {
  double sq = 0.0;
  for (double v : values_) sq += v * v;
  return std::sqrt(sq);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatch("cosine: dimensions " + std::to_string(a.dimension()) + " and " +
                            std::to_string(b.dimension()));
  }
  if (a == b) return 1.0;
  double dot = 0.0;
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
  return std::clamp(dot, -1.0, 1.0);
}

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::uint64_t seed)
    : dim_(dimension), seed_(seed) {
  if (dim_ == 0) throw std::invalid_argument("HashingEmbedder dimension must be positive");
}

std::pair<std::size_t, int> HashingEmbedder::slot(std::string_view token) const {
  auto h = text::fnv1a64(token, text::fnv1a64(text::hex16(seed_)));
  // Sign from the high bit after a splitmix finalizer so it is not
  // correlated with the bucket (low bits).
  std::uint64_t z = h + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return {static_cast<std::size_t>(h % dim_), (z >> 63) ? -1 : 1};
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
  auto tokens = text::word_tokens(text);
  if (tokens.empty()) throw EmptyTextError("embed: text has no word tokens");
  std::vector<double> raw(dim_, 0.0);
  for (const auto& t : tokens) {
    auto [bucket, sign] = slot(t);
    raw[bucket] += sign;
  }
  if (std::all_of(raw.begin(), raw.end(), [](double v) { return v == 0.0; })) {
    // Every token cancelled against a colliding opposite-sign token. Fall
    // back to a single slot keyed by the whole token sequence.
    auto [bucket, sign] = slot(text::join(tokens, " "));
    raw[bucket] = sign;
  }
  return EmbeddingVector::normalized(std::move(raw));
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig cfg)
    : cfg_(std::move(cfg)), api_key_(detail::require_env(cfg_.api_key_env_var)) {
  if (cfg_.endpoint_url.empty()) throw ConfigError("remote embedder needs endpoint_url");
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
  if (text::trim(text).empty()) throw EmptyTextError("embed: empty text");
  nlohmann::json body{{"model", cfg_.model_id}, {"input", std::string(text)}};
  auto res = with_retries(RetryPolicy{cfg_.max_retries, cfg_.retry_backoff_ms}, [&] {
    return detail::http_post_json(cfg_.endpoint_url, {{"Authorization", "Bearer " + api_key_}},
                                  body.dump(), cfg_.timeout_ms);
  });
  std::vector<double> raw;
  try {
    raw = nlohmann::json::parse(res.body).at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected embedding payload: ") + e.what(), false);
  }
  if (raw.size() != cfg_.dimension) {
    throw DimensionMismatch("remote embedder returned " + std::to_string(raw.size()) +
                            " dimensions, configured " + std::to_string(cfg_.dimension));
  }
  return EmbeddingVector::normalized(std::move(raw));
}

}  // namespace ragkit::embedding
