// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ragkit/eval.hpp"
#include "ragkit/filter.hpp"
#include "ragkit/knowledge.hpp"
#include "ragkit/llm_gateway.hpp"
#include "ragkit/reader.hpp"
#include "ragkit/records.hpp"
#include "ragkit/reservoir.hpp"
#include "ragkit/retriever.hpp"
#include "ragkit/rewriter.hpp"

namespace ragkit::pipeline {

enum class RewriteKind { none, single, multi };
enum class QuestionForm { original, rewritten };
enum class KnowledgeUse { none, all, filtered };
enum class ContentMode { snippet, page };

std::string_view to_string(QuestionForm q);
std::string_view to_string(KnowledgeUse k);
std::string_view to_string(ContentMode c);
QuestionForm parse_question_form(std::string_view s);  // std::invalid_argument
KnowledgeUse parse_knowledge_use(std::string_view s);
ContentMode parse_content_mode(std::string_view s);

// What one question's flow does. The five modes are fixed plans; ablation
// settings are further combinations of question form and knowledge use.
struct RunPlan {
  RewriteKind rewrite = RewriteKind::none;
  QuestionForm question = QuestionForm::original;
  KnowledgeUse knowledge = KnowledgeUse::none;
  bool memory = false;
  std::string label;

  static RunPlan for_mode(PipelineMode m);
  // Multi-query rewrite with the given reader question and knowledge use.
  // Label is "<question>/<knowledge>".
  static RunPlan ablation(QuestionForm q, KnowledgeUse k);
};

// Wall: measured around the whole per-question flow. Simulated: the
// critical-path sum of latencies reported by the backends, which makes
// records reproducible byte for byte.
enum class TimingMode { wall, simulated };
// after_batch applies all upserts once the batch finishes, in question id
// order; per_question applies them right after each answer.
enum class ReservoirUpdate { after_batch, per_question };

TimingMode parse_timing_mode(std::string_view s);
ReservoirUpdate parse_reservoir_update(std::string_view s);

struct PipelineConfig {
  int top_n = 10;
  ContentMode content = ContentMode::snippet;  // memory plans use pages when a source is set
  retrieval::ArrangementOrder order = retrieval::ArrangementOrder::mixed;
  std::size_t cap = 30;
  retrieval::Bm25Params bm25;
  memory::TriggerConfig trigger;
  reader::ReaderConfig reader;
  std::size_t workers = 1;             // questions in flight
  std::size_t query_parallelism = 4;   // per-query retrieval within a question
  TimingMode timing = TimingMode::wall;
  ReservoirUpdate reservoir_update = ReservoirUpdate::after_batch;

  void validate() const;  // std::invalid_argument
};

// Non-owning. `pages` and `reservoir` may be null when no plan needs them.
struct Services {
  llm::LlmGateway* gateway = nullptr;
  const rewriter::QueryRewriter* rewriter = nullptr;
  retrieval::SearchBackend* search = nullptr;
  retrieval::PageSource* pages = nullptr;
  const filter::KnowledgeFilter* filter = nullptr;
  memory::MemoryReservoir* reservoir = nullptr;
};

struct QuestionOutcome {
  QaRecord record;
  std::vector<KnowledgeInstance> reader_knowledge;
  std::vector<std::pair<std::string, std::string>> fetched;  // (title, content) to upsert
  std::size_t external_searches = 0;
};

struct Aggregates {
  std::size_t n_questions = 0;
  std::size_t n_failed = 0;
  // Means over successful questions.
  double time_cost_ms = 0.0;
  double external_knowledge = 0.0;
  double memory_knowledge = 0.0;
  double irrelevant_knowledge = 0.0;
  std::size_t back_off_count = 0;
  std::size_t external_searches = 0;
};

struct BatchResult {
  std::vector<QaRecord> records;  // dataset order
  Aggregates aggregates;
};

struct PlateauRow {
  std::size_t snippet_count = 0;
  retrieval::ArrangementOrder order = retrieval::ArrangementOrder::mixed;
  double answer_recall = 0.0;      // mean over questions
  double snippet_precision = 0.0;  // mean over questions
};

struct SweepRow {
  double tau = 0.0;
  Aggregates aggregates;
  double hit_rate_pct = 0.0;
};

class Pipeline {
 public:
  Pipeline(Services services, PipelineConfig cfg);

  // Backend failures are caught and reported as a failed record. The
  // reservoir is never written here.
  QuestionOutcome run_question(const rewriter::OriginalQuestion& p, const RunPlan& plan) const;

  // Records come back in dataset order whatever the worker count.
  BatchResult run_batch(const std::vector<rewriter::OriginalQuestion>& questions, const RunPlan& plan) const;

  // For each order and snippet count, mean Answer Recall and Snippet
  // Precision over the multi-query retrieval of each question.
  std::vector<PlateauRow> plateau_study(const std::vector<eval::QaItem>& items,
                                        const std::vector<std::size_t>& snippet_counts,
                                        const std::vector<retrieval::ArrangementOrder>& orders) const;

  const PipelineConfig& config() const { return cfg_; }
  const Services& services() const { return svc_; }

 private:
  struct Retrieved {
    std::vector<retrieval::SearchResultGroup> groups;
    std::uint64_t external = 0;
    std::uint64_t memory = 0;
    std::uint64_t latency_ms = 0;  // slowest query
    std::size_t external_searches = 0;
    std::vector<std::pair<std::string, std::string>> fetched;
  };

  Retrieved retrieve(const std::vector<std::string>& queries, bool use_memory) const;
  retrieval::SearchResultGroup external_group(const std::string& query, int query_index, bool pages,
                                              std::vector<std::pair<std::string, std::string>>& fetched) const;
  void require(bool ok, const char* what) const;

  Services svc_;
  PipelineConfig cfg_;
};

Aggregates aggregate(const std::vector<QaRecord>& records);

// One memory-augmented batch per tau, each starting from its own copy of
// `seed`. The seed itself is left untouched.
std::vector<SweepRow> sweep_tau(const Services& services, PipelineConfig cfg, const memory::MemoryReservoir& seed,
                                const std::vector<eval::QaItem>& items, const std::vector<double>& grid, int theta);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string plateau_csv(const std::vector<PlateauRow>& rows);

std::vector<rewriter::OriginalQuestion> to_questions(const std::vector<eval::QaItem>& items,
                                                     const std::string& dataset_tag);

}  // namespace ragkit::pipeline
