// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "ragkit/reader.hpp"
#include "test_support.hpp"

namespace ragkit::reader {
namespace {

using ragkit::testing::FnBackend;
using ragkit::testing::ki;

std::vector<KnowledgeInstance> many(int n) {
  std::vector<KnowledgeInstance> out;
  for (int i = 0; i < n; ++i) out.push_back(ki("title " + std::to_string(i), "content " + std::to_string(i), 0, i + 1));
  return out;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Reader, CapsKnowledgeAtThirty) {
  ReaderConfig cfg;
  auto p = assemble_prompt("q", many(35), cfg);
  ASSERT_EQ(p.knowledge_block.size(), 30u);
  EXPECT_EQ(p.knowledge_block.back().title, "title 29");
  EXPECT_EQ(count_of(serialize(p), "Title: "), 30u);

  cfg.max_knowledge = 100;
  EXPECT_EQ(assemble_prompt("q", many(35), cfg).knowledge_block.size(), 30u);
  cfg.max_knowledge = 5;
  EXPECT_EQ(assemble_prompt("q", many(35), cfg).knowledge_block.size(), 5u);
}

TEST(Reader, BackOffFormHasNoKnowledgeHeader) {
  auto s = serialize(assemble_prompt("What year?", {}, {}));
  EXPECT_EQ(s.find("\n[Knowledge]:\n"), std::string::npos);
  EXPECT_NE(s.find("What year?"), std::string::npos);
}

TEST(Reader, SectionOrder) {
  ReaderConfig cfg;
  cfg.examples_text = "Q: x\nA: y";
  auto s = serialize(assemble_prompt("What year?", many(2), cfg));
  auto i = s.find("[Instruction]");
  auto q = s.find("[Question]");
  auto k = s.find("[Knowledge]");
  auto e = s.find("[Examples]");
  auto f = s.find("[Format]");
  ASSERT_NE(i, std::string::npos);
  EXPECT_LT(i, q);
  EXPECT_LT(q, k);
  EXPECT_LT(k, e);
  EXPECT_LT(e, f);
  EXPECT_NE(s.find("Title: title 0\nContent: content 0\n\nTitle: title 1\nContent: content 1"), std::string::npos);
}

TEST(Reader, AnswersFromScriptedMock) {
  ReaderConfig cfg;
  auto prompt = assemble_prompt("Which film was released earlier?",
                                {ki("The Girl from Monterrey", "A 1943 film."), ki("Jhuthi Sharm", "A 1986 film.")}, cfg);
  auto mock = std::make_shared<llm::ScriptedMockBackend>();
  mock->add(serialize(prompt), "  The Girl from Monterrey \n");
  llm::GatewayConfig gcfg;
  llm::LlmGateway gw(gcfg, mock);
  Reader reader(gw);
  EXPECT_EQ(reader.answer(prompt), "The Girl from Monterrey");
}

TEST(Reader, UnscriptedReplyIsReturnedAndCounted) {
  auto mock = std::make_shared<llm::ScriptedMockBackend>();
  llm::LlmGateway gw({}, mock);
  Reader reader(gw);
  EXPECT_EQ(reader.answer(assemble_prompt("q", {}, {})), llm::ScriptedMockBackend::kUnscripted);
  EXPECT_EQ(mock->miss_count(), 1u);
}

TEST(Reader, ReportsLatency) {
  auto backend = std::make_shared<FnBackend>([](const llm::ChatRequest&) { return std::string("a"); }, 77);
  llm::LlmGateway gw({}, backend);
  Reader reader(gw);
  std::uint64_t latency = 0;
  reader.answer(assemble_prompt("q", {}, {}), latency);
  EXPECT_EQ(latency, 77u);
}

}  // namespace
}  // namespace ragkit::reader
