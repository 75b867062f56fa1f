// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/knowledge.hpp"

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit {

std::string_view to_string(NliLabel label) {
  switch (label) {
    case NliLabel::entailment:
      return "entailment";
    case NliLabel::contradiction:
      return "contradiction";
    case NliLabel::neutral:
      return "neutral";
  }
  return "neutral";
}

std::optional<NliLabel> parse_nli_label(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "entailment") return NliLabel::entailment;
  if (l == "contradiction") return NliLabel::contradiction;
  if (l == "neutral") return NliLabel::neutral;
  return std::nullopt;
}

std::string knowledge_id(std::string_view title, std::string_view content) {
  std::string key(title);
  key.push_back('\x1f');
  key.append(content);
  return text::hex16(text::fnv1a64(key));
}

KnowledgeInstance KnowledgeInstance::make(std::string title, std::string content,
                                          KnowledgeSource source) {
  if (text::trim(title).empty()) throw EmptyField("knowledge instance title is empty");
  if (text::trim(content).empty()) throw EmptyField("knowledge instance content is empty");
  KnowledgeInstance k;
  k.id = knowledge_id(title, content);
  k.title = std::move(title);
  k.content = std::move(content);
  k.source = std::move(source);
  return k;
}

}  // namespace ragkit
