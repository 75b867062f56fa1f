// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/records.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit {

std::string_view to_string(PipelineMode m) {
  switch (m) {
    case PipelineMode::direct:
      return "direct";
    case PipelineMode::rrr:
      return "rrr";
    case PipelineMode::rplus_rr:
      return "rplus_rr";
    case PipelineMode::rplus_rfr:
      return "rplus_rfr";
    case PipelineMode::memory_augmented:
      return "memory_augmented";
  }
  return "direct";
}

PipelineMode parse_mode(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  for (auto m : {PipelineMode::direct, PipelineMode::rrr, PipelineMode::rplus_rr, PipelineMode::rplus_rfr,
                 PipelineMode::memory_augmented}) {
    if (l == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown pipeline mode '" + std::string(s) + "'");
}

std::string_view display_name(PipelineMode m) {
  switch (m) {
    case PipelineMode::direct:
      return "Direct";
    case PipelineMode::rrr:
      return "Rewriter-Retriever-Reader";
    case PipelineMode::rplus_rr:
      return "Rewriter+-Retriever-Reader";
    case PipelineMode::rplus_rfr:
      return "Rewriter+-Retriever-Filter-Reader";
    case PipelineMode::memory_augmented:
      return "Memory-Augmented";
  }
  return "Direct";
}

std::string to_json_line(const QaRecord& r) {
  nlohmann::ordered_json j;
  j["question_id"] = r.question_id;
  j["mode"] = r.mode;
  j["question_form"] = r.question_form;
  j["knowledge_use"] = r.knowledge_use;
  j["rewritten_question"] = r.rewritten_question;
  j["queries"] = r.queries;
  j["response"] = r.response;
  j["time_cost_ms"] = r.time_cost_ms;
  j["backend_latency_ms"] = r.backend_latency_ms;
  j["external_knowledge_count"] = r.external_knowledge_count;
  j["memory_knowledge_count"] = r.memory_knowledge_count;
  j["irrelevant_knowledge_count"] = r.irrelevant_knowledge_count;
  j["back_off_used"] = r.back_off_used;
  j["failed"] = r.failed;
  j["error"] = r.error;
  return j.dump();
}

QaRecord record_from_json_line(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    QaRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.question_form = j.value("question_form", std::string{});
    r.knowledge_use = j.value("knowledge_use", std::string{});
    r.rewritten_question = j.value("rewritten_question", std::string{});
    r.queries = j.value("queries", std::vector<std::string>{});
    r.response = j.value("response", std::string{});
    r.time_cost_ms = j.value("time_cost_ms", std::uint64_t{0});
    r.backend_latency_ms = j.value("backend_latency_ms", std::uint64_t{0});
    r.external_knowledge_count = j.value("external_knowledge_count", std::uint64_t{0});
    r.memory_knowledge_count = j.value("memory_knowledge_count", std::uint64_t{0});
    r.irrelevant_knowledge_count = j.value("irrelevant_knowledge_count", std::uint64_t{0});
    r.back_off_used = j.value("back_off_used", false);
    r.failed = j.value("failed", false);
    r.error = j.value("error", std::string{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("record: ") + e.what());
  }
}

void write_records(const std::filesystem::path& path, const std::vector<QaRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write records " + path.string());
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<QaRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records " + path.string());
  std::vector<QaRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(record_from_json_line(line));
    } catch (const FormatError& e) {
      throw FormatError(e.what(), lineno);
    }
  }
  return out;
}

}  // namespace ragkit
