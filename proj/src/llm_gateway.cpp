// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/llm_gateway.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "http_client.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit::llm {

using nlohmann::json;

std::string full_prompt(const ChatRequest& req) {
  if (req.system_text && !req.system_text->empty()) {
    return *req.system_text + "\n\n" + req.user_text;
  }
  return req.user_text;
}

std::uint64_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

// ---- scripted mock --------------------------------------------------------

ScriptedMockBackend::ScriptedMockBackend(const std::vector<MockScriptEntry>& entries) {
  for (const auto& e : entries) by_fp_[e.fingerprint] = e.response;
}

void ScriptedMockBackend::add(std::string_view prompt, std::string response) {
  by_fp_[text::prompt_fingerprint(prompt)] = std::move(response);
}

ChatResponse ScriptedMockBackend::send(const ChatRequest& req) {
  auto prompt = full_prompt(req);
  auto fp = text::prompt_fingerprint(prompt);
  ChatResponse out;
  out.input_token_estimate = estimate_tokens(prompt);
  if (auto it = by_fp_.find(fp); it != by_fp_.end()) {
    ++hits_;
    out.text = it->second;
  } else {
    {
      std::lock_guard lock(miss_mu_);
      ++misses_;
      missed_.insert(fp);
    }
    spdlog::debug("mock: no script entry for fingerprint {} (tag '{}')", fp, req.request_tag);
    out.text = std::string(kUnscripted);
  }
  out.output_token_estimate = estimate_tokens(out.text);
  out.latency_ms = latency_ms_;
  return out;
}

std::size_t ScriptedMockBackend::miss_count() const {
  std::lock_guard lock(miss_mu_);
  return misses_;
}

std::vector<std::string> ScriptedMockBackend::missed_fingerprints() const {
  std::lock_guard lock(miss_mu_);
  return {missed_.begin(), missed_.end()};
}

namespace {

bool is_hex16(const std::string& s) {
  if (s.size() != 16) return false;
  for (char c : s) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::vector<MockScriptEntry> read_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock script " + path.string());
  std::vector<MockScriptEntry> out;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("mock script: invalid JSON: ") + e.what(), lineno);
    }
    if (!rec.is_object() || !rec.contains("fp") || !rec.contains("response") ||
        !rec["fp"].is_string() || !rec["response"].is_string() ||
        (rec.contains("prompt") && !rec["prompt"].is_string())) {
      throw FormatError("mock script: record needs string fields fp, prompt, response", lineno);
    }
    MockScriptEntry e{text::to_lower(rec["fp"].get<std::string>()),
                      rec.value("prompt", std::string{}), rec["response"].get<std::string>()};
    if (!is_hex16(e.fingerprint)) {
      throw FormatError("mock script: fp must be 16 hex digits", lineno);
    }
    if (!e.prompt.empty() && text::prompt_fingerprint(e.prompt) != e.fingerprint) {
      spdlog::warn("mock script {}:{}: fp does not match the stored prompt", path.string(), lineno);
    }
    if (auto it = index.find(e.fingerprint); it != index.end()) {
      spdlog::warn("mock script {}:{}: duplicate fingerprint {}, later record wins", path.string(),
                   lineno, e.fingerprint);
      out[it->second] = std::move(e);
    } else {
      index.emplace(e.fingerprint, out.size());
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::shared_ptr<ScriptedMockBackend> mock_script_load(const std::filesystem::path& path) {
  return std::make_shared<ScriptedMockBackend>(read_mock_script(path));
}

void write_mock_script(const std::filesystem::path& path, const std::vector<MockScriptEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write mock script " + path.string());
  for (const auto& e : entries) {
    nlohmann::ordered_json rec;
    rec["fp"] = e.fingerprint;
    rec["prompt"] = e.prompt;
    rec["response"] = e.response;
    out << rec.dump() << '\n';
  }
}

// ---- remote ---------------------------------------------------------------

RemoteChatBackend::RemoteChatBackend(const GatewayConfig& cfg)
    : endpoint_(cfg.endpoint_url), api_key_(detail::require_env(cfg.api_key_env_var)),
      timeout_ms_(cfg.timeout_ms) {
  if (endpoint_.empty()) throw ConfigError("remote LLM backend needs endpoint_url");
}

ChatResponse RemoteChatBackend::send(const ChatRequest& req) {
  json body;
  body["model"] = req.model_id;
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_output_tokens;
  body["messages"] = json::array();
  if (req.system_text && !req.system_text->empty()) {
    body["messages"].push_back({{"role", "system"}, {"content", *req.system_text}});
  }
  body["messages"].push_back({{"role", "user"}, {"content", req.user_text}});

  auto start = std::chrono::steady_clock::now();
  auto res = detail::http_post_json(endpoint_, {{"Authorization", "Bearer " + api_key_}},
                                    body.dump(), timeout_ms_);
  auto elapsed = std::chrono::steady_clock::now() - start;

  ChatResponse out;
  try {
    auto reply = json::parse(res.body);
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    if (reply.contains("usage")) {
      const auto& u = reply["usage"];
      out.input_token_estimate = u.value("prompt_tokens", estimate_tokens(full_prompt(req)));
      out.output_token_estimate = u.value("completion_tokens", estimate_tokens(out.text));
    } else {
      out.input_token_estimate = estimate_tokens(full_prompt(req));
      out.output_token_estimate = estimate_tokens(out.text);
    }
  } catch (const json::exception& e) {
    throw TransportError(std::string("unexpected chat completion payload: ") + e.what(), false);
  }
  out.latency_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
  return out;
}

// ---- recording ------------------------------------------------------------

ChatResponse RecordingBackend::send(const ChatRequest& req) {
  auto res = inner_->send(req);
  auto prompt = full_prompt(req);
  auto fp = text::prompt_fingerprint(prompt);
  std::lock_guard lock(mu_);
  captured_[fp] = MockScriptEntry{fp, std::move(prompt), res.text};
  return res;
}

std::vector<MockScriptEntry> RecordingBackend::entries() const {
  std::lock_guard lock(mu_);
  std::vector<MockScriptEntry> out;
  out.reserve(captured_.size());
  for (const auto& [fp, e] : captured_) out.push_back(e);
  return out;
}

// ---- gateway --------------------------------------------------------------

LlmGateway::LlmGateway(GatewayConfig cfg, std::shared_ptr<ChatBackend> backend)
    : cfg_(std::move(cfg)), backend_(std::move(backend)),
      limiter_(static_cast<std::size_t>(std::max(1, cfg_.max_concurrent_requests))) {
  if (!backend_) throw std::invalid_argument("LlmGateway needs a backend");
}

ChatRequest LlmGateway::make_request(std::string user_text, std::string tag) const {
  ChatRequest req;
  req.model_id = cfg_.model_id;
  req.user_text = std::move(user_text);
  req.request_tag = std::move(tag);
  return req;
}

ChatResponse LlmGateway::complete(const ChatRequest& req) {
  if (req.user_text.empty()) throw std::invalid_argument("ChatRequest.user_text is empty");
  if (req.temperature < 0) throw std::invalid_argument("ChatRequest.temperature is negative");
  AdmissionLimiter::Permit permit(limiter_);
  RetryPolicy policy{cfg_.max_retries, cfg_.retry_backoff_ms};
  return with_retries(policy, [&] {
    ++attempts_;
    return backend_->send(req);
  });
}

std::shared_ptr<ChatBackend> make_backend(const GatewayConfig& cfg) {
  switch (cfg.backend_kind) {
    case BackendKind::remote_http:
      return std::make_shared<RemoteChatBackend>(cfg);
    case BackendKind::scripted_mock:
    {
      auto mock = cfg.script_path.empty() ? std::make_shared<ScriptedMockBackend>() : mock_script_load(cfg.script_path);
      mock->set_reported_latency(cfg.mock_latency_ms);
      return mock;
    }
  }
  throw ConfigError("unknown LLM backend kind");
}

}  // namespace ragkit::llm
