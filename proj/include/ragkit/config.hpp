// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ragkit/embedding.hpp"
#include "ragkit/filter.hpp"
#include "ragkit/llm_gateway.hpp"
#include "ragkit/pipeline.hpp"
#include "ragkit/records.hpp"
#include "ragkit/reservoir.hpp"
#include "ragkit/retriever.hpp"
#include "ragkit/rewriter.hpp"

namespace ragkit::config {

enum class SearchKind { fixture, remote };
enum class PageKind { none, fixture, http };
enum class EmbeddingKind { hashing, remote };

// Parsed run manifest. Relative paths are resolved against the directory of
// the file they were read from.
struct RunConfig {
  std::filesystem::path base_dir;

  llm::GatewayConfig gateway;

  SearchKind search_kind = SearchKind::fixture;
  std::filesystem::path search_corpus;
  std::uint64_t search_latency_ms = 0;
  retrieval::RemoteSearchConfig remote_search;

  PageKind page_kind = PageKind::none;
  std::filesystem::path page_manifest;
  std::uint64_t page_latency_ms = 0;
  int page_timeout_ms = 30000;

  EmbeddingKind embedding_kind = EmbeddingKind::hashing;
  std::size_t embedding_dimension = 256;
  std::uint64_t embedding_seed = embedding::HashingEmbedder::kDefaultSeed;
  embedding::RemoteEmbedderConfig remote_embedding;

  rewriter::RewriterConfig rewriter;
  filter::HypothesisStrength hypothesis;
  std::size_t filter_parallelism = 4;

  pipeline::PipelineConfig pipeline;

  std::optional<PipelineMode> mode;
  std::filesystem::path dataset;
  std::string dataset_tag;
  std::filesystem::path reservoir;
  // Ablation settings; when present `run` executes each one instead of a mode.
  std::vector<pipeline::RunPlan> settings;

  // Throws ConfigError naming the offending key; IoError if unreadable.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_json_text(const std::string& text, const std::filesystem::path& base_dir);
};

// Owns every backend a run needs.
struct Stack {
  std::shared_ptr<llm::ChatBackend> chat;
  std::unique_ptr<llm::LlmGateway> gateway;
  std::unique_ptr<rewriter::QueryRewriter> rewriter;
  std::unique_ptr<retrieval::SearchBackend> search;
  std::unique_ptr<retrieval::PageSource> pages;
  std::unique_ptr<filter::KnowledgeFilter> filter;
  std::shared_ptr<const embedding::Embedder> embedder;
  std::unique_ptr<memory::MemoryReservoir> reservoir;

  pipeline::Services services() const;
};

// Lets callers wrap or replace the chat backend, e.g. to record prompts.
using ChatBackendHook = std::function<std::shared_ptr<llm::ChatBackend>(std::shared_ptr<llm::ChatBackend>)>;

struct BuildOptions {
  bool with_memory = false;                   // embedder + reservoir
  std::filesystem::path reservoir_path;       // loaded when it exists
  ChatBackendHook chat_hook;
  std::shared_ptr<llm::ChatBackend> chat_override;  // used instead of the configured backend
};

// Constructs backends. Remote backends check their key variables here, so a
// missing key fails before any question runs.
Stack build_stack(const RunConfig& cfg, const BuildOptions& opts);

std::shared_ptr<const embedding::Embedder> make_embedder(const RunConfig& cfg);

}  // namespace ragkit::config
