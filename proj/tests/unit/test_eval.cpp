// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "ragkit/errors.hpp"
#include "ragkit/eval.hpp"
#include "test_support.hpp"

namespace ragkit::eval {
namespace {

using ragkit::testing::ki;
using ragkit::testing::TempDir;
using ragkit::testing::write_file;

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize("The  Girl, from Monterrey!"), "girl from monterrey");
  EXPECT_EQ(normalize(""), "");
  EXPECT_EQ(normalize("An apple a day"), "apple day");
  EXPECT_EQ(normalize("Theatre"), "theatre");
}

TEST(Normalize, Idempotent) {
  std::mt19937 rng(1);
  const std::string alphabet = "abcdeThA .,!?'-\t";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    for (int j = 0, n = static_cast<int>(rng() % 30); j < n; ++j) s.push_back(alphabet[rng() % alphabet.size()]);
    EXPECT_EQ(normalize(normalize(s)), normalize(s)) << s;
  }
}

TEST(Hit, SubstringOfNormalizedResponse) {
  EXPECT_TRUE(hit("It was released in 1943.", {"1943"}));
  EXPECT_FALSE(hit("unknown", {"1943"}));
  EXPECT_TRUE(hit("THE GIRL FROM MONTERREY", {"x", "Girl from Monterrey"}));
}

TEST(TokenF1, HandComputedCase) {
  // precision 2/4, recall 2/3
  EXPECT_NEAR(token_f1("p q c d", {"c d e"}), 4.0 / 7.0, 1e-9);
  // "a" is an article and is removed before counting tokens.
  EXPECT_NEAR(token_f1("a b c d", {"c d e"}), 2.0 / 3.0, 1e-9);
}

TEST(TokenF1, Boundaries) {
  EXPECT_DOUBLE_EQ(token_f1("Jhuthi Sharm", {"jhuthi sharm"}), 1.0);
  EXPECT_DOUBLE_EQ(token_f1("x y", {"z"}), 0.0);
  EXPECT_DOUBLE_EQ(token_f1("", {"the"}), 1.0);
  EXPECT_DOUBLE_EQ(token_f1("", {"z"}), 0.0);
  EXPECT_DOUBLE_EQ(token_f1("x y", {"z", "y x"}), 1.0);
}

TEST(ExactMatch, StricterThanHit) {
  EXPECT_TRUE(exact_match("1943", {"1943"}));
  EXPECT_FALSE(exact_match("in 1943", {"1943"}));
  EXPECT_TRUE(hit("in 1943", {"1943"}));
  std::mt19937 rng(2);
  const std::vector<std::string> words{"a", "the", "x", "y", "1943", "Z", ",", "z."};
  for (int i = 0; i < 2000; ++i) {
    auto phrase = [&] {
      std::string s;
      for (int j = 0, n = static_cast<int>(rng() % 4); j < n; ++j) s += words[rng() % words.size()] + " ";
      return s;
    };
    auto resp = phrase();
    std::vector<std::string> answers{phrase() + "k"};
    if (exact_match(resp, answers)) EXPECT_TRUE(hit(resp, answers));
  }
}

TEST(AnswerRecall, Ratio) {
  std::vector<KnowledgeInstance> ks{ki("t", "this mentions X only")};
  EXPECT_DOUBLE_EQ(answer_recall(ks, {"X", "Z"}), 0.5);
  EXPECT_DOUBLE_EQ(answer_recall({}, {"X"}), 0.0);
  // Titles count too.
  EXPECT_DOUBLE_EQ(answer_recall({ki("Y", "nothing")}, {"Y"}), 1.0);
}

TEST(SnippetPrecision, Ratio) {
  std::vector<KnowledgeInstance> ks;
  for (int i = 0; i < 10; ++i) ks.push_back(ki("t" + std::to_string(i), i < 3 ? "has ans" : "nothing"));
  EXPECT_DOUBLE_EQ(snippet_precision(ks, {"ans"}), 0.3);
  EXPECT_DOUBLE_EQ(snippet_precision({ki("a", "ans"), ki("b", "ans too")}, {"ans"}), 1.0);
  EXPECT_DOUBLE_EQ(snippet_precision({}, {"ans"}), 0.0);
}

TEST(Dataset, LoadsValidFile) {
  TempDir dir;
  write_file(dir / "d.jsonl",
             R"({"id":"1","question":"q1","answers":["a"]})"
             "\n"
             R"({"id":2,"question":"q2","answers":["b","c"]})"
             "\n\n"
             R"({"id":"3","question":"q3","answers":["d"]})"
             "\n");
  auto items = load_dataset(dir / "d.jsonl");
  ASSERT_EQ(items.size(), 3u);
  EXPECT_EQ(items[1].id, "2");
  EXPECT_EQ(items[1].answers.size(), 2u);
}

TEST(Dataset, EmptyAnswersNamesLine) {
  TempDir dir;
  write_file(dir / "d.jsonl",
             R"({"id":"1","question":"q1","answers":["a"]})"
             "\n"
             R"({"id":"2","question":"q2","answers":[]})"
             "\n");
  try {
    load_dataset(dir / "d.jsonl");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::vector<std::string> problems;
  auto items = load_dataset(dir / "d.jsonl", false, &problems);
  EXPECT_EQ(items.size(), 1u);
  EXPECT_EQ(problems.size(), 1u);
}

TEST(Dataset, DuplicateIdsRejected) {
  TempDir dir;
  write_file(dir / "d.jsonl",
             R"({"id":"1","question":"q1","answers":["a"]})"
             "\n"
             R"({"id":"1","question":"q2","answers":["b"]})"
             "\n");
  EXPECT_THROW(load_dataset(dir / "d.jsonl"), FormatError);
}

TEST(Dataset, WriteReadRoundTrip) {
  TempDir dir;
  std::vector<QaItem> items{{"a", "q?", {"x", "y"}}, {"b", "r?", {"z"}}};
  write_dataset(dir / "d.jsonl", items);
  auto back = load_dataset(dir / "d.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].answers, items[0].answers);
  EXPECT_EQ(back[1].question, "r?");
}

TEST(ConvertPublic, Formats) {
  TempDir dir;
  write_file(dir / "nq.jsonl", R"({"id":7,"question":"who","answer":["A","A","B"]})"
                               "\n");
  auto nq = convert_public(PublicFormat::nq, dir / "nq.jsonl");
  ASSERT_EQ(nq.size(), 1u);
  EXPECT_EQ(nq[0].id, "7");
  EXPECT_EQ(nq[0].answers, (std::vector<std::string>{"A", "B"}));

  write_file(dir / "pop.json", R"([{"id":"p1","question":"what","possible_answers":"[\"x\", \"y\"]"}])");
  auto pop = convert_public(PublicFormat::popqa, dir / "pop.json");
  EXPECT_EQ(pop[0].answers, (std::vector<std::string>{"x", "y"}));

  write_file(dir / "amb.jsonl",
             R"({"id":"m","question":"q","annotations":[{"type":"singleAnswer","answer":["s"]},{"type":"multipleQAs","qaPairs":[{"question":"q1","answer":["t","u"]}]}]})"
             "\n");
  EXPECT_EQ(convert_public(PublicFormat::ambignq, dir / "amb.jsonl")[0].answers,
            (std::vector<std::string>{"s", "t", "u"}));

  write_file(dir / "hp.json", R"([{"_id":"h","question":"q","answer":"yes","answer_aliases":["Yes."]}])");
  auto hp = convert_public(parse_public_format("2wikimqa"), dir / "hp.json");
  EXPECT_EQ(hp[0].id, "h");
  EXPECT_EQ(hp[0].answers, (std::vector<std::string>{"yes", "Yes."}));

  write_file(dir / "bad.json", R"([{"_id":"h","question":"q"}])");
  EXPECT_THROW(convert_public(PublicFormat::hotpotqa, dir / "bad.json"), FormatError);
  EXPECT_THROW(parse_public_format("squad"), std::invalid_argument);
}

QaRecord rec(const std::string& id, const std::string& mode, const std::string& response, bool failed = false) {
  QaRecord r;
  r.question_id = id;
  r.mode = mode;
  r.response = response;
  r.failed = failed;
  return r;
}

TEST(EvaluateRun, SingleRecord) {
  auto reps = evaluate_run({rec("1", "direct", "1943")}, {{"1", "q", {"1943"}}}, "tag");
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_DOUBLE_EQ(reps[0].f1_mean, 100.0);
  EXPECT_DOUBLE_EQ(reps[0].hit_rate_pct, 100.0);
  EXPECT_EQ(reps[0].dataset_tag, "tag");
}

TEST(EvaluateRun, ModesInFirstAppearanceOrder) {
  std::vector<QaItem> items{{"1", "q", {"x"}}, {"2", "q", {"y"}}};
  auto reps = evaluate_run({rec("1", "rrr", "x"), rec("1", "direct", "no"), rec("2", "rrr", "no"),
                            rec("2", "direct", "y", true)},
                           items);
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_EQ(reps[0].method, "rrr");
  EXPECT_EQ(reps[0].n_questions, 2u);
  EXPECT_DOUBLE_EQ(reps[0].hit_rate_pct, 50.0);
  // The failed record scores zero even though its text would hit.
  EXPECT_DOUBLE_EQ(reps[1].hit_rate_pct, 0.0);
  EXPECT_THROW(evaluate_run({rec("9", "rrr", "x")}, items), UnknownQuestionId);
}

TEST(EvaluateRun, RecomputationOracle) {
  std::mt19937 rng(9);
  std::vector<QaItem> items;
  std::vector<QaRecord> records;
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "the"};
  for (int i = 0; i < 60; ++i) {
    QaItem it{std::to_string(i), "q", {words[rng() % 4] + " " + words[rng() % 5]}};
    items.push_back(it);
    std::string resp = words[rng() % 5] + " " + words[rng() % 5] + " " + words[rng() % 5];
    records.push_back(rec(it.id, "rplus_rfr", resp));
  }
  auto reps = evaluate_run(records, items);
  ASSERT_EQ(reps.size(), 1u);
  double f1 = 0, hits = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    f1 += token_f1(records[i].response, items[i].answers);
    hits += hit(records[i].response, items[i].answers) ? 1 : 0;
  }
  EXPECT_NEAR(reps[0].f1_mean, 100.0 * f1 / 60.0, 1e-9);
  EXPECT_NEAR(reps[0].hit_rate_pct, 100.0 * hits / 60.0, 1e-9);
  EXPECT_EQ(reps[0].hits, static_cast<std::size_t>(hits));
}

TEST(Reports, TablesAndCsv) {
  std::vector<QaItem> items{{"1", "q", {"x"}}};
  auto reps = evaluate_run({rec("1", "rplus_rfr", "x"), rec("1", "direct", "no")}, items, "popqa");
  EXPECT_EQ(method_label(reps[0]), display_name(PipelineMode::rplus_rfr));
  auto csv = to_csv(reps);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,method,F1,hit_rate");
  EXPECT_NE(csv.find("popqa," + std::string(display_name(PipelineMode::rplus_rfr)) + ",100.00,100.00"),
            std::string::npos);
  auto table = format_table(reps);
  EXPECT_NE(table.find("F1"), std::string::npos);
  EXPECT_NE(table.find("Hit Rate"), std::string::npos);
  EXPECT_EQ(fixed2(2.0 / 3.0), "0.67");

  QaRecord a = rec("1", "rewritten/filtered", "x");
  a.question_form = "rewritten";
  a.knowledge_use = "filtered";
  auto abl = evaluate_run({a}, items, "popqa");
  auto acsv = to_ablation_csv(abl);
  EXPECT_EQ(acsv, "dataset,question,knowledge,F1,hit_rate\npopqa,rewritten,filtered,100.00,100.00\n");
  EXPECT_NE(format_ablation_table(abl).find("Knowledge"), std::string::npos);
}

}  // namespace
}  // namespace ragkit::eval
