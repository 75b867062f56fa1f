// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ragkit/knowledge.hpp"
#include "ragkit/llm_gateway.hpp"

namespace ragkit::filter {

struct NliJudgment {
  std::string explanation;
  NliLabel label = NliLabel::neutral;
  std::string raw_text;
};

inline constexpr std::string_view kParseFailure = "PARSE_FAILURE";

enum class HypothesisKind { strong, weak };

std::string_view to_string(HypothesisKind k);
HypothesisKind parse_hypothesis_kind(std::string_view s);

struct HypothesisStrength {
  HypothesisKind kind = HypothesisKind::strong;
  std::string strong_text = "The [Knowledge] contains direct and explicit answer information for the [Question].";
  std::string weak_text = "The [Knowledge] contains information that possibly aids in answering the [Question].";

  const std::string& active_text() const { return kind == HypothesisKind::strong ? strong_text : weak_text; }
};

struct FilterOutcome {
  std::vector<KnowledgeInstance> retained;   // entailment, input order
  std::vector<KnowledgeInstance> discarded;  // contradiction or neutral, input order
  bool back_off = true;                      // retained.empty()
  std::uint64_t latency_ms = 0;              // slowest judge call

  std::size_t irrelevant_count() const { return discarded.size(); }
};

std::string build_prompt(std::string_view question, const KnowledgeInstance& k, const HypothesisStrength& strength);

// Parses "{explanation}**{label}" (split at the last "**"). Anything else is
// neutral with explanation PARSE_FAILURE.
NliJudgment parse_judgment(std::string_view raw);

class KnowledgeFilter {
 public:
  // `parallelism` bounds concurrent judge calls for one filter() invocation.
  KnowledgeFilter(llm::LlmGateway& gateway, HypothesisStrength strength, std::size_t parallelism = 4);

  NliJudgment judge(std::string_view question, const KnowledgeInstance& k) const;
  NliJudgment judge(std::string_view question, const KnowledgeInstance& k, std::uint64_t& latency_ms) const;

  // Judges every instance, stamps nli_label, partitions. A judge call that
  // fails terminally counts as neutral and is logged.
  FilterOutcome filter(std::string_view question, const std::vector<KnowledgeInstance>& ks) const;

  const HypothesisStrength& strength() const { return strength_; }

 private:
  llm::LlmGateway& gateway_;
  HypothesisStrength strength_;
  std::size_t parallelism_;
};

}  // namespace ragkit::filter
