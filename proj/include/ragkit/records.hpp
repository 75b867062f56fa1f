// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ragkit {

enum class PipelineMode { direct, rrr, rplus_rr, rplus_rfr, memory_augmented };

std::string_view to_string(PipelineMode m);
PipelineMode parse_mode(std::string_view s);  // std::invalid_argument
// Display name used in report tables, e.g. "Rewriter+-Retriever-Filter-Reader".
std::string_view display_name(PipelineMode m);

// One question's run trace.
struct QaRecord {
  std::string question_id;
  std::string mode;           // PipelineMode name or an ablation label
  std::string question_form;  // "original" | "rewritten"
  std::string knowledge_use;  // "none" | "all" | "filtered"
  std::string rewritten_question;
  std::vector<std::string> queries;
  std::string response;
  std::uint64_t time_cost_ms = 0;
  std::uint64_t backend_latency_ms = 0;  // critical-path sum of backend latencies
  std::uint64_t external_knowledge_count = 0;
  std::uint64_t memory_knowledge_count = 0;
  std::uint64_t irrelevant_knowledge_count = 0;
  bool back_off_used = false;
  bool failed = false;
  std::string error;

  friend bool operator==(const QaRecord&, const QaRecord&) = default;
};

std::string to_json_line(const QaRecord& r);
QaRecord record_from_json_line(std::string_view line);  // FormatError

void write_records(const std::filesystem::path& path, const std::vector<QaRecord>& records);
std::vector<QaRecord> read_records(const std::filesystem::path& path);

}  // namespace ragkit
