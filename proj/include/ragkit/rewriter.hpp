// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ragkit/llm_gateway.hpp"

namespace ragkit::rewriter {

struct OriginalQuestion {
  std::string id;
  std::string text;
  std::string dataset_tag;
};

struct RewriteResult {
  std::string rewritten_question;
  std::vector<std::string> queries;
  bool used_fallback = false;

  friend bool operator==(const RewriteResult&, const RewriteResult&) = default;
};

extern const std::string_view kDefaultInstruction;
extern const std::string_view kFormatLine;

struct RewriterConfig {
  int max_queries = 3;
  std::string examples_text;
  std::string instruction_text = std::string(kDefaultInstruction);
};

// [Instruction], [Original Question], [Examples], [Format], in that order.
std::string build_prompt(const OriginalQuestion& p, const RewriterConfig& cfg);

// Splits `raw` on "**": the first trimmed segment is the rewritten question,
// the rest are queries (trimmed, empties dropped, case-insensitive dedup
// keeping the first, then truncated to max_queries). nullopt when the
// question is empty or no query survives.
std::optional<RewriteResult> parse_rewrite_output(std::string_view raw, int max_queries);

// Inverse of parse_rewrite_output for well-formed inputs.
std::string serialize_rewrite(const std::string& rewritten, const std::vector<std::string>& queries);

// Fallback result: the original text as both question and sole query.
RewriteResult fallback_for(const OriginalQuestion& p);

class QueryRewriter {
 public:
  QueryRewriter(llm::LlmGateway& gateway, RewriterConfig cfg);

  // One LLM call; malformed replies yield fallback_for(p). Gateway errors
  // propagate.
  RewriteResult rewrite(const OriginalQuestion& p) const;

  // Single-query baseline: same prompt, one query, question left as p.text.
  RewriteResult rewrite_single_query(const OriginalQuestion& p) const;

  const RewriterConfig& config() const { return cfg_; }

  // Same, also reporting the backend latency of the call.
  RewriteResult rewrite(const OriginalQuestion& p, std::uint64_t& latency_ms) const;
  RewriteResult rewrite_single_query(const OriginalQuestion& p, std::uint64_t& latency_ms) const;

 private:
  RewriteResult run(const OriginalQuestion& p, int max_queries, std::uint64_t& latency_ms) const;

  llm::LlmGateway& gateway_;
  RewriterConfig cfg_;
};

}  // namespace ragkit::rewriter
