// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ragkit/embedding.hpp"
#include "ragkit/knowledge.hpp"

namespace ragkit::memory {

struct ReservoirEntry {
  std::string title;  // as first inserted
  std::string content;
  embedding::EmbeddingVector title_embedding;
  std::uint64_t inserted_at = 0;  // sequence number of the last write
};

struct TriggerConfig {
  double tau = 0.6;
  int theta = 3;
  int max_memory_instances_per_query = 10;

  void validate() const;  // std::invalid_argument
};

struct TitleMatch {
  std::string title;
  double similarity = 0.0;
  std::uint64_t inserted_at = 0;
};

struct PopularityReport {
  std::string query;
  std::size_t pop = 0;
  bool within_boundary = false;
  std::vector<TitleMatch> matched_titles;  // similarity desc, fresher first on ties
};

enum class UpsertOutcome { inserted, replaced };

// Title keys compare case-insensitively after trimming.
std::string normalize_title_key(std::string_view title);

// The cached title-content set plus the popularity-based retrieval trigger.
// Readers (popularity, recall) run concurrently; writers are exclusive.
class MemoryReservoir {
 public:
  explicit MemoryReservoir(std::shared_ptr<const embedding::Embedder> embedder);

  // Inserts a new title, or replaces content and sequence number of an
  // existing one (embedding kept). EmptyField on blank input.
  UpsertOutcome upsert(std::string_view title, std::string_view content);

  // Applies all pairs under one exclusive lock.
  void upsert_batch(const std::vector<std::pair<std::string, std::string>>& items);

  PopularityReport popularity(std::string_view query, const TriggerConfig& cfg) const;

  // Top matches as memory-sourced instances; empty when outside the boundary.
  std::vector<KnowledgeInstance> recall_knowledge(std::string_view query, const TriggerConfig& cfg) const;
  std::vector<KnowledgeInstance> recall_knowledge(const PopularityReport& report, const TriggerConfig& cfg) const;

  // Line-delimited {"title","content","seq"} in sequence order.
  void persist(const std::filesystem::path& path) const;
  // Replaces the current state. Duplicate titles: later record wins.
  void load(const std::filesystem::path& path);

  // Renumbers sequence numbers to 1..N keeping their order.
  void compact();

  // Independent copy sharing the embedder.
  std::unique_ptr<MemoryReservoir> clone() const;

  std::size_t size() const;
  std::vector<ReservoirEntry> entries() const;  // sequence order
  const embedding::Embedder& embedder() const { return *embedder_; }

 private:
  UpsertOutcome upsert_locked(std::string_view title, std::string_view content);
  std::vector<KnowledgeInstance> recall_locked(const PopularityReport& report, const TriggerConfig& cfg) const;

  std::shared_ptr<const embedding::Embedder> embedder_;
  mutable std::shared_mutex mu_;
  std::vector<ReservoirEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace ragkit::memory
