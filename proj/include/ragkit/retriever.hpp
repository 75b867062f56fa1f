// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ragkit/knowledge.hpp"
#include "ragkit/retry.hpp"

namespace ragkit::retrieval {

struct SearchHit {
  std::string title;
  std::string snippet;
  std::string url;
};

struct SearchResponse {
  std::vector<SearchHit> hits;  // rank order
  std::uint64_t latency_ms = 0;
};

struct SearchResultGroup {
  std::string query;
  int query_index = 0;
  std::vector<KnowledgeInstance> instances;  // rank order, at most n
  std::uint64_t latency_ms = 0;
};

class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual SearchResponse search(const std::string& query, int n) = 0;
};

// Exact-query lookup into a line-delimited corpus of
// {"query": ..., "results": [{"title", "snippet", "url"}]} records.
// Unknown queries return no hits. Reports `simulated_latency_ms` per call
// without sleeping.
class FixtureSearchBackend : public SearchBackend {
 public:
  explicit FixtureSearchBackend(const std::filesystem::path& corpus, std::uint64_t simulated_latency_ms = 0);
  FixtureSearchBackend(std::unordered_map<std::string, std::vector<SearchHit>> corpus,
                       std::uint64_t simulated_latency_ms = 0);

  SearchResponse search(const std::string& query, int n) override;
  std::size_t size() const { return corpus_.size(); }

 private:
  std::unordered_map<std::string, std::vector<SearchHit>> corpus_;
  std::uint64_t latency_ms_;
};

struct RemoteSearchConfig {
  std::string endpoint_url;  // e.g. https://api.bing.microsoft.com/v7.0/search
  std::string api_key_env_var;
  std::string api_key_header = "Ocp-Apim-Subscription-Key";
  int max_retries = 2;
  int retry_backoff_ms = 500;
  int timeout_ms = 30000;
};

// Web-search API client. Understands the Bing v7 payload (webPages.value)
// and a flat {"results": [{"title", "snippet", "url"}]} payload.
class RemoteSearchBackend : public SearchBackend {
 public:
  // Throws AuthError if the key variable is unset.
  explicit RemoteSearchBackend(RemoteSearchConfig cfg);
  SearchResponse search(const std::string& query, int n) override;

 private:
  RemoteSearchConfig cfg_;
  std::string api_key_;
};

std::vector<SearchHit> parse_search_payload(std::string_view body);

// Runs one query and wraps the hits as external knowledge instances with
// 1-based ranks. Hits with a blank title or snippet are dropped.
SearchResultGroup search(SearchBackend& backend, const std::string& query, int n, int query_index = 0);

// ---- BM25 -----------------------------------------------------------------

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
  int passage_window_sentences = 3;
  int passages_kept = 5;

  void validate() const;  // std::invalid_argument
};

struct CorpusStats {
  std::size_t passage_count = 0;
  double average_length = 0.0;
  std::unordered_map<std::string, std::size_t> document_frequency;

  static CorpusStats build(const std::vector<std::vector<std::string>>& passages);
};

// Okapi BM25 with IDF(t) = ln((N - df + 0.5) / (df + 0.5) + 1). Repeated
// query tokens contribute once per occurrence.
double bm25_score(const std::vector<std::string>& query_tokens, const std::vector<std::string>& passage,
                  const CorpusStats& stats, const Bm25Params& params = {});

// ---- page mode ------------------------------------------------------------

struct PageFetch {
  std::string html;
  std::uint64_t latency_ms = 0;
};

class PageSource {
 public:
  virtual ~PageSource() = default;
  virtual PageFetch fetch(const std::string& url) = 0;  // FetchError
};

// Local HTML files keyed by URL in a line-delimited {"url", "path"} manifest.
// Paths resolve relative to the manifest's directory.
class FixturePageSource : public PageSource {
 public:
  explicit FixturePageSource(const std::filesystem::path& manifest, std::uint64_t simulated_latency_ms = 0);
  PageFetch fetch(const std::string& url) override;

 private:
  std::unordered_map<std::string, std::filesystem::path> pages_;
  std::uint64_t latency_ms_;
};

class HttpPageSource : public PageSource {
 public:
  explicit HttpPageSource(int timeout_ms = 30000, RetryPolicy retry = {});
  PageFetch fetch(const std::string& url) override;

 private:
  int timeout_ms_;
  RetryPolicy retry_;
};

// Strips markup (script/style/head-only elements dropped, block tags become
// line breaks) and decodes the common entities.
std::string html_to_text(std::string_view html);
std::string html_title(std::string_view html);

// Sentences in document order; line breaks always end a sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Groups sentences into non-overlapping windows, keeps the passages_kept
// best-scoring windows against `query` (ties to the earlier window) and
// joins them in document order. EmptyPage when no sentence is found.
std::string distill_text(std::string_view plain_text, std::string_view query, const Bm25Params& params);

std::string fetch_and_distill(PageSource& source, const std::string& url, std::string_view query,
                              const Bm25Params& params);

// ---- arrangement ----------------------------------------------------------

enum class ArrangementOrder { sequential, mixed };

std::string_view to_string(ArrangementOrder o);
ArrangementOrder parse_arrangement(std::string_view s);

// sequential: groups back to back in query_index order. mixed: rank-wise
// round robin across groups in query_index order, skipping exhausted
// groups. Both drop repeated ids (first emitted copy wins) and truncate to
// `cap`.
std::vector<KnowledgeInstance> arrange(const std::vector<SearchResultGroup>& groups, ArrangementOrder order,
                                       std::size_t cap);

}  // namespace ragkit::retrieval
