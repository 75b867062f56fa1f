// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ragkit/concurrency.hpp"
#include "ragkit/retry.hpp"

namespace ragkit::llm {

struct ChatRequest {
  std::string model_id;
  std::optional<std::string> system_text;
  std::string user_text;
  double temperature = 0.0;
  int max_output_tokens = 512;
  std::string request_tag;
};

struct ChatResponse {
  std::string text;
  std::uint64_t input_token_estimate = 0;
  std::uint64_t output_token_estimate = 0;
  std::uint64_t latency_ms = 0;
};

enum class BackendKind { remote_http, scripted_mock };

struct GatewayConfig {
  BackendKind backend_kind = BackendKind::scripted_mock;
  std::string model_id = "gpt-3.5-turbo";
  std::string endpoint_url;     // remote only
  std::string api_key_env_var;  // remote only
  int max_retries = 2;
  int retry_backoff_ms = 500;
  int max_concurrent_requests = 4;
  int timeout_ms = 60000;
  std::filesystem::path script_path;  // scripted_mock only; empty means no entries
  std::uint64_t mock_latency_ms = 0;  // scripted_mock only; reported, never slept
};

// The text a fingerprint is taken over: system text (if any), a blank line,
// then the user text.
std::string full_prompt(const ChatRequest& req);

// Rough token count used for accounting only (4 bytes per token).
std::uint64_t estimate_tokens(std::string_view text);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // One attempt. Retries and admission control are the gateway's job.
  virtual ChatResponse send(const ChatRequest& req) = 0;
};

struct MockScriptEntry {
  std::string fingerprint;
  std::string prompt;
  std::string response;
};

// Replays responses keyed by prompt fingerprint. Read-only after loading, so
// one instance can be shared by every worker.
class ScriptedMockBackend : public ChatBackend {
 public:
  static constexpr std::string_view kUnscripted = "UNSCRIPTED";

  ScriptedMockBackend() = default;
  explicit ScriptedMockBackend(const std::vector<MockScriptEntry>& entries);

  // Registers (or replaces) the response for `prompt`.
  void add(std::string_view prompt, std::string response);

  ChatResponse send(const ChatRequest& req) override;

  std::size_t size() const { return by_fp_.size(); }
  std::size_t miss_count() const;
  std::vector<std::string> missed_fingerprints() const;
  std::size_t hit_count() const { return hits_.load(); }
  void set_reported_latency(std::uint64_t ms) { latency_ms_ = ms; }

 private:
  std::unordered_map<std::string, std::string> by_fp_;
  std::atomic<std::size_t> hits_{0};
  std::uint64_t latency_ms_ = 0;
  mutable std::mutex miss_mu_;
  std::size_t misses_ = 0;
  std::set<std::string> missed_;
};

// Line-delimited {"fp","prompt","response"} records. Duplicate fingerprints:
// the last record wins and a warning is logged.
std::vector<MockScriptEntry> read_mock_script(const std::filesystem::path& path);
std::shared_ptr<ScriptedMockBackend> mock_script_load(const std::filesystem::path& path);
void write_mock_script(const std::filesystem::path& path, const std::vector<MockScriptEntry>& entries);

// OpenAI-compatible chat-completions endpoint.
class RemoteChatBackend : public ChatBackend {
 public:
  // Throws AuthError when the key variable is unset; no network traffic.
  explicit RemoteChatBackend(const GatewayConfig& cfg);
  ChatResponse send(const ChatRequest& req) override;

 private:
  std::string endpoint_;
  std::string api_key_;
  int timeout_ms_;
};

// Decorator that captures every successful exchange in mock-script form.
class RecordingBackend : public ChatBackend {
 public:
  explicit RecordingBackend(std::shared_ptr<ChatBackend> inner) : inner_(std::move(inner)) {}
  ChatResponse send(const ChatRequest& req) override;

  // Sorted by fingerprint so the written script is independent of call order.
  std::vector<MockScriptEntry> entries() const;
  void write(const std::filesystem::path& path) const { write_mock_script(path, entries()); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  mutable std::mutex mu_;
  std::map<std::string, MockScriptEntry> captured_;
};

class LlmGateway {
 public:
  LlmGateway(GatewayConfig cfg, std::shared_ptr<ChatBackend> backend);

  // Blocks for an admission slot, then sends with retries. Throws AuthError,
  // TransportError (retries exhausted) or TimeoutError.
  ChatResponse complete(const ChatRequest& req);

  // Request with the configured model id and determinism-first defaults.
  ChatRequest make_request(std::string user_text, std::string tag) const;

  const GatewayConfig& config() const { return cfg_; }
  const std::shared_ptr<ChatBackend>& backend() const { return backend_; }
  std::uint64_t attempts_made() const { return attempts_.load(); }

 private:
  GatewayConfig cfg_;
  std::shared_ptr<ChatBackend> backend_;
  AdmissionLimiter limiter_;
  std::atomic<std::uint64_t> attempts_{0};
};

// Builds the backend named by cfg.backend_kind. Remote backends validate the
// API key variable here, before any request is made.
std::shared_ptr<ChatBackend> make_backend(const GatewayConfig& cfg);

}  // namespace ragkit::llm
