// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/reader.hpp"

#include <algorithm>

#include "ragkit/text.hpp"

namespace ragkit::reader {

ReaderPrompt assemble_prompt(const std::string& question, const std::vector<KnowledgeInstance>& knowledge,
                             const ReaderConfig& cfg) {
  ReaderPrompt p;
  p.instruction_text = cfg.instruction_text;
  p.question_text = question;
  auto cap = std::min(cfg.max_knowledge, kMaxKnowledge);
  auto n = std::min(cap, knowledge.size());
  p.knowledge_block.assign(knowledge.begin(), knowledge.begin() + static_cast<std::ptrdiff_t>(n));
  p.examples_text = cfg.examples_text;
  p.format_text = cfg.format_text;
  return p;
}

std::string serialize(const ReaderPrompt& prompt) {
  std::string out;
  out += "[Instruction]:\n";
  out += prompt.instruction_text;
  out += "\n\n[Question]:\n";
  out += prompt.question_text;
  if (!prompt.knowledge_block.empty()) {
    out += "\n\n[Knowledge]:";
    for (std::size_t i = 0; i < prompt.knowledge_block.size(); ++i) {
      const auto& k = prompt.knowledge_block[i];
      out += i == 0 ? "\n" : "\n\n";
      out += "Title: ";
      out += k.title;
      out += "\nContent: ";
      out += k.content;
    }
  }
  if (!prompt.examples_text.empty()) {
    out += "\n\n[Examples]:\n";
    out += prompt.examples_text;
  }
  out += "\n\n[Format]:\n";
  out += prompt.format_text;
  return out;
}

std::string Reader::answer(const ReaderPrompt& prompt, std::uint64_t& latency_ms) const {
  auto res = gateway_.complete(gateway_.make_request(serialize(prompt), "read"));
  latency_ms = res.latency_ms;
  return text::trim(res.text);
}

std::string Reader::answer(const ReaderPrompt& prompt) const {
  std::uint64_t ignored = 0;
  return answer(prompt, ignored);
}

}  // namespace ragkit::reader
