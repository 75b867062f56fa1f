// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ragkit/knowledge.hpp"
#include "ragkit/llm_gateway.hpp"

namespace ragkit::reader {

inline constexpr std::size_t kMaxKnowledge = 30;

// Default texts are this project's own wording.
struct ReaderConfig {
  std::string instruction_text =
      "Answer the [Question] concisely. Use the [Knowledge] when it is relevant; otherwise rely on what you know.";
  std::string examples_text;
  std::string format_text = "A short answer, then at most one sentence of justification.";
  std::size_t max_knowledge = kMaxKnowledge;
};

struct ReaderPrompt {
  std::string instruction_text;
  std::string question_text;
  std::vector<KnowledgeInstance> knowledge_block;
  std::string examples_text;
  std::string format_text;
};

// Copies the knowledge in order, truncated to min(cfg.max_knowledge, 30).
ReaderPrompt assemble_prompt(const std::string& question, const std::vector<KnowledgeInstance>& knowledge,
                             const ReaderConfig& cfg);

// Sections: instruction, question, knowledge (omitted when empty), examples
// (omitted when empty), format. Each instance renders as
// "Title: ...\nContent: ...", instances separated by a blank line.
std::string serialize(const ReaderPrompt& prompt);

class Reader {
 public:
  explicit Reader(llm::LlmGateway& gateway) : gateway_(gateway) {}

  // One LLM call; reply trimmed.
  std::string answer(const ReaderPrompt& prompt) const;
  std::string answer(const ReaderPrompt& prompt, std::uint64_t& latency_ms) const;

 private:
  llm::LlmGateway& gateway_;
};

}  // namespace ragkit::reader
