// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ragkit/errors.hpp"
#include "ragkit/filter.hpp"
#include "test_support.hpp"

namespace ragkit::filter {
namespace {

using ragkit::testing::FnBackend;
using ragkit::testing::ki;
using ragkit::testing::section;

llm::GatewayConfig fast(int concurrency = 8) {
  llm::GatewayConfig cfg;
  cfg.retry_backoff_ms = 0;
  cfg.max_concurrent_requests = concurrency;
  return cfg;
}

// Judge that answers from a title -> reply table.
std::shared_ptr<FnBackend> table_judge(std::map<std::string, std::string> replies) {
  return std::make_shared<FnBackend>([replies = std::move(replies)](const llm::ChatRequest& req) {
    auto knowledge = section(req.user_text, "Knowledge");
    auto title = knowledge.substr(0, knowledge.find('\n'));
    auto it = replies.find(title);
    return it == replies.end() ? std::string("no idea") : it->second;
  });
}

std::string reply_for(NliLabel l) { return "Because.**" + std::string(to_string(l)); }

TEST(ParseJudgment, WellFormed) {
  auto j = parse_judgment("The snippet states the release year directly.**entailment");
  EXPECT_EQ(j.label, NliLabel::entailment);
  EXPECT_EQ(j.explanation, "The snippet states the release year directly.");
  EXPECT_EQ(parse_judgment("x**contradiction").label, NliLabel::contradiction);
  EXPECT_EQ(parse_judgment("x ** Neutral.").label, NliLabel::neutral);
  EXPECT_EQ(parse_judgment("a ** b**{entailment}").label, NliLabel::entailment);
}

TEST(ParseJudgment, MalformedIsNeutralParseFailure) {
  for (auto raw : {"irrelevant text with no separator", "x**maybe", "", "**"}) {
    auto j = parse_judgment(raw);
    EXPECT_EQ(j.label, NliLabel::neutral) << raw;
    EXPECT_EQ(j.explanation, kParseFailure) << raw;
    EXPECT_EQ(j.raw_text, raw);
  }
}

TEST(BuildPrompt, CarriesHypothesisQuestionAndKnowledge) {
  HypothesisStrength strong;
  HypothesisStrength weak;
  weak.kind = HypothesisKind::weak;
  auto k = ki("Jhuthi Sharm", "Jhuthi Sharm is a 1986 Hindi film.");
  auto ps = build_prompt("Which film came out first?", k, strong);
  auto pw = build_prompt("Which film came out first?", k, weak);
  EXPECT_NE(ps.find(strong.strong_text), std::string::npos);
  EXPECT_NE(pw.find(weak.weak_text), std::string::npos);
  EXPECT_NE(ps, pw);
  EXPECT_EQ(section(ps, "Question"), "Which film came out first?");
  EXPECT_EQ(section(ps, "Knowledge"), "Jhuthi Sharm\nJhuthi Sharm is a 1986 Hindi film.");
  EXPECT_LT(ps.find("\n[Question]:\n"), ps.find("\n[Knowledge]:\n"));
  EXPECT_EQ(parse_hypothesis_kind("weak"), HypothesisKind::weak);
  EXPECT_THROW(parse_hypothesis_kind("medium"), std::invalid_argument);
}

TEST(KnowledgeFilter, EmptyInputBacksOff) {
  llm::LlmGateway gw(fast(), table_judge({}));
  KnowledgeFilter f(gw, {});
  auto out = f.filter("q", {});
  EXPECT_TRUE(out.retained.empty());
  EXPECT_TRUE(out.discarded.empty());
  EXPECT_TRUE(out.back_off);
}

TEST(KnowledgeFilter, PartitionFollowsLabels) {
  llm::LlmGateway gw(fast(), table_judge({{"k1", reply_for(NliLabel::entailment)},
                                          {"k2", reply_for(NliLabel::neutral)},
                                          {"k3", reply_for(NliLabel::contradiction)},
                                          {"k4", reply_for(NliLabel::entailment)}}));
  KnowledgeFilter f(gw, {}, 2);
  std::vector<KnowledgeInstance> ks{ki("k1", "c1"), ki("k2", "c2"), ki("k3", "c3"), ki("k4", "c4")};
  auto out = f.filter("q", ks);
  ASSERT_EQ(out.retained.size(), 2u);
  EXPECT_EQ(out.retained[0].title, "k1");
  EXPECT_EQ(out.retained[1].title, "k4");
  ASSERT_EQ(out.discarded.size(), 2u);
  EXPECT_EQ(out.discarded[0].title, "k2");
  EXPECT_EQ(out.discarded[1].title, "k3");
  EXPECT_EQ(out.discarded[1].nli_label, NliLabel::contradiction);
  EXPECT_EQ(out.retained[0].nli_label, NliLabel::entailment);
  EXPECT_FALSE(out.back_off);
  EXPECT_EQ(out.irrelevant_count(), 2u);
}

TEST(KnowledgeFilter, FilmComparisonCase) {
  const std::string q = "Which film was released earlier, The Girl From Monterrey or Jhuthi Sharm?";
  auto backend = std::make_shared<FnBackend>([](const llm::ChatRequest& req) {
    auto k = section(req.user_text, "Knowledge");
    bool on_topic = k.find("released") != std::string::npos;
    return std::string(on_topic ? "States a release date.**entailment" : "Unrelated topic.**neutral");
  });
  llm::LlmGateway gw(fast(), backend);
  KnowledgeFilter f(gw, {});
  auto out = f.filter(q, {ki("The Girl from Monterrey", "The Girl from Monterrey is a film released in 1943."),
                          ki("Jhuthi Sharm", "Jhuthi Sharm was released in 1986."),
                          ki("Monterrey", "Monterrey is a city in northeastern Mexico.")});
  EXPECT_EQ(out.retained.size(), 2u);
  ASSERT_EQ(out.discarded.size(), 1u);
  EXPECT_EQ(out.discarded[0].title, "Monterrey");
}

TEST(KnowledgeFilter, TerminalJudgeFailureCountsAsNeutral) {
  auto backend = std::make_shared<FnBackend>([](const llm::ChatRequest& req) -> std::string {
    if (section(req.user_text, "Knowledge").rfind("bad", 0) == 0) throw TransportError("down");
    return "ok**entailment";
  });
  auto cfg = fast();
  cfg.max_retries = 1;
  llm::LlmGateway gw(cfg, backend);
  KnowledgeFilter f(gw, {});
  auto out = f.filter("q", {ki("good", "c"), ki("bad", "c")});
  ASSERT_EQ(out.retained.size(), 1u);
  ASSERT_EQ(out.discarded.size(), 1u);
  EXPECT_EQ(out.discarded[0].nli_label, NliLabel::neutral);
}

TEST(KnowledgeFilter, ReportsSlowestJudgeLatency) {
  auto backend = std::make_shared<FnBackend>([](const llm::ChatRequest&) { return std::string("x**entailment"); }, 250);
  llm::LlmGateway gw(fast(), backend);
  KnowledgeFilter f(gw, {}, 3);
  auto out = f.filter("q", {ki("a", "1"), ki("b", "2"), ki("c", "3"), ki("d", "4")});
  EXPECT_EQ(out.latency_ms, 250u);
}

TEST(KnowledgeFilter, RandomizedPartitionLaws) {
  std::mt19937 rng(17);
  const NliLabel all[] = {NliLabel::entailment, NliLabel::contradiction, NliLabel::neutral};
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = rng() % 101;
    std::map<std::string, std::string> replies;
    std::vector<KnowledgeInstance> ks;
    std::size_t non_entail = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto title = "t" + std::to_string(i);
      int pick = static_cast<int>(rng() % 4);
      if (pick == 3) {
        replies[title] = "garbled reply";
        ++non_entail;
      } else {
        replies[title] = reply_for(all[pick]);
        if (all[pick] != NliLabel::entailment) ++non_entail;
      }
      ks.push_back(ki(title, "content " + std::to_string(i)));
    }
    llm::LlmGateway gw(fast(), table_judge(replies));
    KnowledgeFilter f(gw, {}, 1 + rng() % 8);
    auto out = f.filter("q", ks);
    EXPECT_EQ(out.retained.size() + out.discarded.size(), n);
    EXPECT_EQ(out.irrelevant_count(), non_entail);
    EXPECT_EQ(out.back_off, out.retained.empty());
    // Each side keeps input order.
    auto position = [&](const KnowledgeInstance& k) { return std::stoi(k.title.substr(1)); };
    for (std::size_t i = 1; i < out.retained.size(); ++i) {
      EXPECT_LT(position(out.retained[i - 1]), position(out.retained[i]));
    }
    for (std::size_t i = 1; i < out.discarded.size(); ++i) {
      EXPECT_LT(position(out.discarded[i - 1]), position(out.discarded[i]));
    }
  }
}

}  // namespace
}  // namespace ragkit::filter
