// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ragkit/knowledge.hpp"
#include "ragkit/records.hpp"

namespace ragkit::eval {

struct QaItem {
  std::string id;
  std::string question;
  std::vector<std::string> answers;  // non-empty, each non-empty
};

// Lowercase, drop ASCII punctuation, drop standalone a/an/the, collapse
// whitespace.
std::string normalize(std::string_view s);

// normalize(answer) is a substring of normalize(response) for some answer.
bool hit(std::string_view response, const std::vector<std::string>& answers);

// Best token-level F1 over the answers, in [0, 1].
double token_f1(std::string_view response, const std::vector<std::string>& answers);

bool exact_match(std::string_view response, const std::vector<std::string>& answers);

// Share of answers whose normalized text occurs in some instance's
// normalized "title content".
double answer_recall(const std::vector<KnowledgeInstance>& knowledge, const std::vector<std::string>& answers);

// Share of instances that contain any normalized answer; 0 for no instances.
double snippet_precision(const std::vector<KnowledgeInstance>& knowledge, const std::vector<std::string>& answers);

// Line-delimited {"id", "question", "answers": [...]} records. Strict mode
// throws FormatError on the first bad line; lenient mode skips it, logs a
// warning and appends a description to `problems` when given.
std::vector<QaItem> load_dataset(const std::filesystem::path& path, bool strict = true,
                                 std::vector<std::string>* problems = nullptr);
void write_dataset(const std::filesystem::path& path, const std::vector<QaItem>& items);

enum class PublicFormat { nq, popqa, ambignq, hotpotqa, twowikimqa };

PublicFormat parse_public_format(std::string_view s);

// Reads a public benchmark file (JSON array or JSON lines) into QaItems.
std::vector<QaItem> convert_public(PublicFormat format, const std::filesystem::path& path);

struct EvalReport {
  std::string dataset_tag;
  std::string method;         // record mode label
  std::string question_form;  // for the ablation layout
  std::string knowledge_use;
  std::size_t n_questions = 0;
  std::size_t hits = 0;
  double f1_mean = 0.0;       // percent
  double hit_rate_pct = 0.0;  // 100 * hits / n_questions
  double em_pct = 0.0;
  std::optional<double> answer_recall;      // retrieval studies only
  std::optional<double> snippet_precision;  // retrieval studies only
};

// One report per distinct record mode, in order of first appearance. Failed
// records score zero. Throws UnknownQuestionId.
std::vector<EvalReport> evaluate_run(const std::vector<QaRecord>& records, const std::vector<QaItem>& items,
                                     const std::string& dataset_tag = "");

// Method column shows the display name for the five pipeline modes.
std::string method_label(const EvalReport& r);

std::string format_table(const std::vector<EvalReport>& reports);
std::string to_csv(const std::vector<EvalReport>& reports);

// Question / Knowledge columns instead of Method.
std::string format_ablation_table(const std::vector<EvalReport>& reports);
std::string to_ablation_csv(const std::vector<EvalReport>& reports);

std::string fixed2(double v);

}  // namespace ragkit::eval
