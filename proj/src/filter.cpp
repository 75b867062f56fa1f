// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/filter.hpp"

#include <algorithm>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "ragkit/concurrency.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit::filter {

std::string_view to_string(HypothesisKind k) { return k == HypothesisKind::strong ? "strong" : "weak"; }

HypothesisKind parse_hypothesis_kind(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "strong") return HypothesisKind::strong;
  if (l == "weak") return HypothesisKind::weak;
  throw std::invalid_argument("unknown hypothesis strength '" + std::string(s) + "'");
}

std::string build_prompt(std::string_view question, const KnowledgeInstance& k, const HypothesisStrength& strength) {
  std::string out;
  out += "[Instruction]: Your task is to solve the NLI problem: given the premise in [Knowledge] and the hypothesis that \"";
  out += strength.active_text();
  out += "\". You should classify the response as entailment, contradiction, or neutral.\n\n[Question]:\n";
  out += question;
  out += "\n\n[Knowledge]:\n";
  out += k.title;
  out += "\n";
  out += k.content;
  out += "\n\n[Format]:\n{The explanation.}**{The NLI result.}";
  return out;
}

NliJudgment parse_judgment(std::string_view raw) {
  NliJudgment j;
  j.raw_text = std::string(raw);
  auto pos = raw.rfind("**");
  if (pos != std::string_view::npos) {
    auto label_text = text::trim(raw.substr(pos + 2));
    // Tolerate wrapping like "{entailment}" or a trailing period.
    label_text.erase(std::remove_if(label_text.begin(), label_text.end(),
                                    [](char c) { return c == '{' || c == '}' || c == '.' || c == '"'; }),
                     label_text.end());
    if (auto label = parse_nli_label(label_text)) {
      j.label = *label;
      j.explanation = text::trim(raw.substr(0, pos));
      return j;
    }
  }
  j.label = NliLabel::neutral;
  j.explanation = std::string(kParseFailure);
  return j;
}

KnowledgeFilter::KnowledgeFilter(llm::LlmGateway& gateway, HypothesisStrength strength, std::size_t parallelism)
    : gateway_(gateway), strength_(std::move(strength)), parallelism_(std::max<std::size_t>(1, parallelism)) {}

NliJudgment KnowledgeFilter::judge(std::string_view question, const KnowledgeInstance& k,
                                   std::uint64_t& latency_ms) const {
  auto res = gateway_.complete(gateway_.make_request(build_prompt(question, k, strength_), "judge:" + k.id));
  latency_ms = res.latency_ms;
  return parse_judgment(res.text);
}

NliJudgment KnowledgeFilter::judge(std::string_view question, const KnowledgeInstance& k) const {
  std::uint64_t ignored = 0;
  return judge(question, k, ignored);
}

FilterOutcome KnowledgeFilter::filter(std::string_view question, const std::vector<KnowledgeInstance>& ks) const {
  std::vector<NliLabel> labels(ks.size(), NliLabel::neutral);
  std::vector<std::uint64_t> latencies(ks.size(), 0);
  parallel_for(ks.size(), parallelism_, [&](std::size_t i) {
    try {
      labels[i] = judge(question, ks[i], latencies[i]).label;
    } catch (const RagError& e) {
      spdlog::error("filter: judging instance {} failed, treating as neutral: {}", ks[i].id, e.what());
      labels[i] = NliLabel::neutral;
    }
  });

  FilterOutcome out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    auto k = ks[i];
    k.nli_label = labels[i];
    (labels[i] == NliLabel::entailment ? out.retained : out.discarded).push_back(std::move(k));
  }
  out.back_off = out.retained.empty();
  for (auto l : latencies) out.latency_ms = std::max(out.latency_ms, l);
  return out;
}

}  // namespace ragkit::filter
