// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ragkit/errors.hpp"

namespace ragkit::config {

using nlohmann::json;

namespace {

// Reads typed fields from one JSON object and rejects keys it was not asked
// about, so a typo in the manifest is an error instead of a silent default.
class Section {
 public:
  Section(const json& j, std::string name) : name_(std::move(name)) {
    if (j.is_null()) return;
    if (!j.is_object()) throw ConfigError(name_ + ": expected an object");
    obj_ = j;
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_[key].is_null()) return fallback;
    try {
      return obj_[key].get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  std::filesystem::path path(const std::string& key, const std::filesystem::path& base) {
    auto s = get<std::string>(key, "");
    if (s.empty()) return {};
    std::filesystem::path p(s);
    return p.is_absolute() ? p : base / p;
  }

  json child(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) ? obj_[key] : json();
  }

  template <typename Fn>
  auto parse(const std::string& key, const std::string& fallback, Fn fn) {
    auto s = get<std::string>(key, fallback);
    try {
      return fn(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    if (!obj_.is_object()) return;
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) throw ConfigError(name_ + ": unknown key '" + k + "'");
    }
  }

 private:
  json obj_ = json::object();
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = std::filesystem::absolute(path).parent_path();
  return from_json_text(ss.str(), base);
}

RunConfig RunConfig::from_json_text(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  c.base_dir = base_dir;
  Section top(root, "config");

  {
    Section s(top.child("gateway"), "gateway");
    auto kind = s.get<std::string>("backend", "scripted_mock");
    if (kind == "scripted_mock" || kind == "mock") {
      c.gateway.backend_kind = llm::BackendKind::scripted_mock;
    } else if (kind == "remote_http" || kind == "remote") {
      c.gateway.backend_kind = llm::BackendKind::remote_http;
    } else {
      throw ConfigError("gateway.backend: unknown backend '" + kind + "' (scripted_mock|remote_http)");
    }
    c.gateway.script_path = s.path("script", base_dir);
    c.gateway.mock_latency_ms = s.get<std::uint64_t>("simulated_latency_ms", 0);
    c.gateway.model_id = s.get<std::string>("model_id", c.gateway.model_id);
    c.gateway.endpoint_url = s.get<std::string>("endpoint_url", "https://api.openai.com/v1/chat/completions");
    c.gateway.api_key_env_var = s.get<std::string>("api_key_env_var", "OPENAI_API_KEY");
    c.gateway.max_retries = s.get<int>("max_retries", c.gateway.max_retries);
    c.gateway.retry_backoff_ms = s.get<int>("retry_backoff_ms", c.gateway.retry_backoff_ms);
    c.gateway.max_concurrent_requests = s.get<int>("max_concurrent_requests", c.gateway.max_concurrent_requests);
    c.gateway.timeout_ms = s.get<int>("timeout_ms", c.gateway.timeout_ms);
    if (c.gateway.max_retries < 0) throw ConfigError("gateway.max_retries must be >= 0");
    if (c.gateway.max_concurrent_requests < 1) throw ConfigError("gateway.max_concurrent_requests must be >= 1");
    if (c.gateway.timeout_ms < 1) throw ConfigError("gateway.timeout_ms must be >= 1");
    s.finish();
  }
  {
    Section s(top.child("search"), "search");
    auto kind = s.get<std::string>("backend", "fixture");
    if (kind == "fixture") {
      c.search_kind = SearchKind::fixture;
    } else if (kind == "remote") {
      c.search_kind = SearchKind::remote;
    } else {
      throw ConfigError("search.backend: unknown backend '" + kind + "' (fixture|remote)");
    }
    c.search_corpus = s.path("corpus", base_dir);
    c.search_latency_ms = s.get<std::uint64_t>("simulated_latency_ms", 0);
    c.remote_search.endpoint_url = s.get<std::string>("endpoint_url", "https://api.bing.microsoft.com/v7.0/search");
    c.remote_search.api_key_env_var = s.get<std::string>("api_key_env_var", "BING_SEARCH_KEY");
    c.remote_search.api_key_header = s.get<std::string>("api_key_header", c.remote_search.api_key_header);
    c.remote_search.max_retries = s.get<int>("max_retries", c.remote_search.max_retries);
    c.remote_search.retry_backoff_ms = s.get<int>("retry_backoff_ms", c.remote_search.retry_backoff_ms);
    c.remote_search.timeout_ms = s.get<int>("timeout_ms", c.remote_search.timeout_ms);
    s.finish();
  }
  {
    Section s(top.child("pages"), "pages");
    auto kind = s.get<std::string>("backend", "none");
    if (kind == "none") {
      c.page_kind = PageKind::none;
    } else if (kind == "fixture") {
      c.page_kind = PageKind::fixture;
    } else if (kind == "http") {
      c.page_kind = PageKind::http;
    } else {
      throw ConfigError("pages.backend: unknown backend '" + kind + "' (none|fixture|http)");
    }
    c.page_manifest = s.path("manifest", base_dir);
    c.page_latency_ms = s.get<std::uint64_t>("simulated_latency_ms", 0);
    c.page_timeout_ms = s.get<int>("timeout_ms", c.page_timeout_ms);
    s.finish();
  }
  {
    Section s(top.child("embedding"), "embedding");
    auto kind = s.get<std::string>("backend", "hashing");
    if (kind == "hashing") {
      c.embedding_kind = EmbeddingKind::hashing;
    } else if (kind == "remote") {
      c.embedding_kind = EmbeddingKind::remote;
    } else {
      throw ConfigError("embedding.backend: unknown backend '" + kind + "' (hashing|remote)");
    }
    c.embedding_dimension = s.get<std::size_t>("dimension", c.embedding_dimension);
    c.embedding_seed = s.get<std::uint64_t>("seed", c.embedding_seed);
    c.remote_embedding.endpoint_url = s.get<std::string>("endpoint_url", "https://api.openai.com/v1/embeddings");
    c.remote_embedding.api_key_env_var = s.get<std::string>("api_key_env_var", "OPENAI_API_KEY");
    c.remote_embedding.model_id = s.get<std::string>("model_id", c.remote_embedding.model_id);
    if (c.embedding_kind == EmbeddingKind::remote) c.remote_embedding.dimension = c.embedding_dimension;
    if (c.embedding_dimension < 1) throw ConfigError("embedding.dimension must be >= 1");
    s.finish();
  }
  {
    Section s(top.child("retrieval"), "retrieval");
    auto& p = c.pipeline;
    p.top_n = s.get<int>("top_n", p.top_n);
    p.content = s.parse("content", "snippet", pipeline::parse_content_mode);
    p.order = s.parse("order", "mixed", retrieval::parse_arrangement);
    p.cap = s.get<std::size_t>("cap", p.cap);
    p.query_parallelism = s.get<std::size_t>("query_parallelism", p.query_parallelism);
    Section b(s.child("bm25"), "retrieval.bm25");
    p.bm25.k1 = b.get<double>("k1", p.bm25.k1);
    p.bm25.b = b.get<double>("b", p.bm25.b);
    p.bm25.passage_window_sentences = b.get<int>("passage_window_sentences", p.bm25.passage_window_sentences);
    p.bm25.passages_kept = b.get<int>("passages_kept", p.bm25.passages_kept);
    b.finish();
    s.finish();
  }
  {
    Section s(top.child("rewriter"), "rewriter");
    c.rewriter.max_queries = s.get<int>("max_queries", c.rewriter.max_queries);
    c.rewriter.examples_text = s.get<std::string>("examples_text", c.rewriter.examples_text);
    c.rewriter.instruction_text = s.get<std::string>("instruction_text", c.rewriter.instruction_text);
    if (c.rewriter.max_queries < 1) throw ConfigError("rewriter.max_queries must be >= 1");
    s.finish();
  }
  {
    Section s(top.child("filter"), "filter");
    c.hypothesis.kind = s.parse("strength", "strong", filter::parse_hypothesis_kind);
    c.hypothesis.strong_text = s.get<std::string>("strong_text", c.hypothesis.strong_text);
    c.hypothesis.weak_text = s.get<std::string>("weak_text", c.hypothesis.weak_text);
    c.filter_parallelism = s.get<std::size_t>("parallelism", c.filter_parallelism);
    s.finish();
  }
  {
    Section s(top.child("reader"), "reader");
    auto& r = c.pipeline.reader;
    r.instruction_text = s.get<std::string>("instruction_text", r.instruction_text);
    r.examples_text = s.get<std::string>("examples_text", r.examples_text);
    r.format_text = s.get<std::string>("format_text", r.format_text);
    r.max_knowledge = s.get<std::size_t>("max_knowledge", r.max_knowledge);
    s.finish();
  }
  {
    Section s(top.child("trigger"), "trigger");
    auto& t = c.pipeline.trigger;
    t.tau = s.get<double>("tau", t.tau);
    t.theta = s.get<int>("theta", t.theta);
    t.max_memory_instances_per_query = s.get<int>("max_memory_instances_per_query", t.max_memory_instances_per_query);
    s.finish();
  }

  c.pipeline.workers = top.get<std::size_t>("workers", c.pipeline.workers);
  c.pipeline.timing = top.parse("timing", "wall", pipeline::parse_timing_mode);
  c.pipeline.reservoir_update = top.parse("reservoir_update", "after_batch", pipeline::parse_reservoir_update);
  auto mode = top.get<std::string>("mode", "");
  if (!mode.empty()) {
    try {
      c.mode = parse_mode(mode);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.mode: ") + e.what());
    }
  }
  c.dataset = top.path("dataset", base_dir);
  c.dataset_tag = top.get<std::string>("dataset_tag", "");
  c.reservoir = top.path("reservoir", base_dir);

  auto settings = top.child("settings");
  if (!settings.is_null()) {
    if (!settings.is_array()) throw ConfigError("config.settings: expected an array");
    for (std::size_t i = 0; i < settings.size(); ++i) {
      Section s(settings[i], "settings[" + std::to_string(i) + "]");
      auto q = s.parse("question", "rewritten", pipeline::parse_question_form);
      auto k = s.parse("knowledge", "filtered", pipeline::parse_knowledge_use);
      s.finish();
      c.settings.push_back(pipeline::RunPlan::ablation(q, k));
    }
  }
  top.finish();

  try {
    c.pipeline.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

pipeline::Services Stack::services() const {
  pipeline::Services s;
  s.gateway = gateway.get();
  s.rewriter = rewriter.get();
  s.search = search.get();
  s.pages = pages.get();
  s.filter = filter.get();
  s.reservoir = reservoir.get();
  return s;
}

std::shared_ptr<const embedding::Embedder> make_embedder(const RunConfig& cfg) {
  if (cfg.embedding_kind == EmbeddingKind::remote) {
    return std::make_shared<embedding::RemoteEmbedder>(cfg.remote_embedding);
  }
  return std::make_shared<embedding::HashingEmbedder>(cfg.embedding_dimension, cfg.embedding_seed);
}

Stack build_stack(const RunConfig& cfg, const BuildOptions& opts) {
  Stack st;
  st.chat = opts.chat_override ? opts.chat_override : llm::make_backend(cfg.gateway);
  if (opts.chat_hook) st.chat = opts.chat_hook(st.chat);
  st.gateway = std::make_unique<llm::LlmGateway>(cfg.gateway, st.chat);
  st.rewriter = std::make_unique<rewriter::QueryRewriter>(*st.gateway, cfg.rewriter);
  st.filter = std::make_unique<filter::KnowledgeFilter>(*st.gateway, cfg.hypothesis, cfg.filter_parallelism);

  if (cfg.search_kind == SearchKind::remote) {
    st.search = std::make_unique<retrieval::RemoteSearchBackend>(cfg.remote_search);
  } else if (!cfg.search_corpus.empty()) {
    st.search = std::make_unique<retrieval::FixtureSearchBackend>(cfg.search_corpus, cfg.search_latency_ms);
  }

  switch (cfg.page_kind) {
    case PageKind::none:
      break;
    case PageKind::fixture:
      if (cfg.page_manifest.empty()) throw ConfigError("pages.manifest is required for the fixture page source");
      st.pages = std::make_unique<retrieval::FixturePageSource>(cfg.page_manifest, cfg.page_latency_ms);
      break;
    case PageKind::http:
      st.pages = std::make_unique<retrieval::HttpPageSource>(cfg.page_timeout_ms);
      break;
  }

  if (opts.with_memory) {
    st.embedder = make_embedder(cfg);
    st.reservoir = std::make_unique<memory::MemoryReservoir>(st.embedder);
    if (!opts.reservoir_path.empty() && std::filesystem::exists(opts.reservoir_path)) {
      st.reservoir->load(opts.reservoir_path);
      spdlog::info("reservoir: loaded {} entries from {}", st.reservoir->size(), opts.reservoir_path.string());
    }
  }
  return st;
}

}  // namespace ragkit::config
