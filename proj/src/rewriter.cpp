// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/rewriter.hpp"

#include <stdexcept>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "ragkit/text.hpp"

namespace ragkit::rewriter {

const std::string_view kDefaultInstruction =
    "Your task is to transform a potentially colloquial or jargon-heavy [Original Question] into "
    "a semantically enhanced Rewritten Question with a clear intention. Additionally, generating "
    "several search-friendly Queries that can help find relevant information for answering the "
    "question. You can consider the provided [Examples] and response following the [Format].";

const std::string_view kFormatLine =
    "{The generated Rewritten Question is here}**{query1}**{query2}**{query3}...";

std::string build_prompt(const OriginalQuestion& p, const RewriterConfig& cfg) {
  std::string out;
  out += "[Instruction]: ";
  out += cfg.instruction_text;
  out += "\n\n[Original Question]:\n";
  out += p.text;
  out += "\n\n[Examples]:\n";
  out += cfg.examples_text;
  out += "\n\n[Format]:\n";
  out += kFormatLine;
  return out;
}

std::optional<RewriteResult> parse_rewrite_output(std::string_view raw, int max_queries) {
  if (max_queries < 1) return std::nullopt;
  auto segments = text::split(raw, "**");
  RewriteResult out;
  out.rewritten_question = text::trim(segments.front());
  if (out.rewritten_question.empty()) return std::nullopt;

  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < segments.size(); ++i) {
    auto q = text::trim(segments[i]);
    if (q.empty()) continue;
    if (!seen.insert(text::to_lower(q)).second) continue;
    out.queries.push_back(std::move(q));
    if (static_cast<int>(out.queries.size()) == max_queries) break;
  }
  if (out.queries.empty()) return std::nullopt;
  return out;
}

std::string serialize_rewrite(const std::string& rewritten, const std::vector<std::string>& queries) {
  std::string out = rewritten;
  for (const auto& q : queries) {
    out += "**";
    out += q;
  }
  return out;
}

RewriteResult fallback_for(const OriginalQuestion& p) {
  return RewriteResult{p.text, {p.text}, true};
}

QueryRewriter::QueryRewriter(llm::LlmGateway& gateway, RewriterConfig cfg)
    : gateway_(gateway), cfg_(std::move(cfg)) {
  if (cfg_.max_queries < 1) throw std::invalid_argument("max_queries must be >= 1");
}

RewriteResult QueryRewriter::run(const OriginalQuestion& p, int max_queries,
                                 std::uint64_t& latency_ms) const {
  if (text::trim(p.text).empty()) throw std::invalid_argument("question text is empty");
  auto res = gateway_.complete(gateway_.make_request(build_prompt(p, cfg_), "rewrite:" + p.id));
  latency_ms = res.latency_ms;
  if (auto parsed = parse_rewrite_output(res.text, max_queries)) return *parsed;
  spdlog::warn("rewriter: unparseable reply for question '{}', using fallback", p.id);
  return fallback_for(p);
}

RewriteResult QueryRewriter::rewrite(const OriginalQuestion& p, std::uint64_t& latency_ms) const {
  return run(p, cfg_.max_queries, latency_ms);
}

RewriteResult QueryRewriter::rewrite_single_query(const OriginalQuestion& p,
                                                  std::uint64_t& latency_ms) const {
  auto r = run(p, 1, latency_ms);
  r.rewritten_question = p.text;
  return r;
}

RewriteResult QueryRewriter::rewrite(const OriginalQuestion& p) const {
  std::uint64_t ignored = 0;
  return rewrite(p, ignored);
}

RewriteResult QueryRewriter::rewrite_single_query(const OriginalQuestion& p) const {
  std::uint64_t ignored = 0;
  return rewrite_single_query(p, ignored);
}

}  // namespace ragkit::rewriter
