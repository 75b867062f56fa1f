// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ragkit {

enum class NliLabel { entailment, contradiction, neutral };

std::string_view to_string(NliLabel label);
std::optional<NliLabel> parse_nli_label(std::string_view s);

enum class SourceKind { external, memory };

struct KnowledgeSource {
  SourceKind kind = SourceKind::external;
  int query_index = 0;
  int rank = 1;  // 1-based within its query group
  std::string url;

  friend bool operator==(const KnowledgeSource&, const KnowledgeSource&) = default;
};

// One title-content pair of evidence.
struct KnowledgeInstance {
  std::string id;  // knowledge_id(title, content)
  std::string title;
  std::string content;
  KnowledgeSource source;
  std::optional<NliLabel> nli_label;

  // Throws EmptyField when title or content is blank.
  static KnowledgeInstance make(std::string title, std::string content, KnowledgeSource source);

  friend bool operator==(const KnowledgeInstance&, const KnowledgeInstance&) = default;
};

std::string knowledge_id(std::string_view title, std::string_view content);

}  // namespace ragkit
