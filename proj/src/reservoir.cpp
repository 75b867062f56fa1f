// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/reservoir.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit::memory {

void TriggerConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("trigger: tau must be in [0, 1]");
  if (theta < 1) throw std::invalid_argument("trigger: theta must be >= 1");
  if (max_memory_instances_per_query < 1) {
    throw std::invalid_argument("trigger: max_memory_instances_per_query must be >= 1");
  }
}

std::string normalize_title_key(std::string_view title) { return text::to_lower(text::trim(title)); }

MemoryReservoir::MemoryReservoir(std::shared_ptr<const embedding::Embedder> embedder)
    : embedder_(std::move(embedder)) {
  if (!embedder_) throw std::invalid_argument("MemoryReservoir needs an embedder");
}

UpsertOutcome MemoryReservoir::upsert_locked(std::string_view title, std::string_view content) {
  if (text::trim(title).empty()) throw EmptyField("reservoir: title is empty");
  if (text::trim(content).empty()) throw EmptyField("reservoir: content is empty");
  auto key = normalize_title_key(title);
  if (auto it = index_.find(key); it != index_.end()) {
    auto& e = entries_[it->second];
    e.content = std::string(content);
    e.inserted_at = next_seq_++;
    return UpsertOutcome::replaced;
  }
  ReservoirEntry e;
  e.title = text::trim(title);
  e.content = std::string(content);
  e.title_embedding = embedder_->embed(e.title);
  e.inserted_at = next_seq_++;
  index_.emplace(std::move(key), entries_.size());
  entries_.push_back(std::move(e));
  return UpsertOutcome::inserted;
}

UpsertOutcome MemoryReservoir::upsert(std::string_view title, std::string_view content) {
  std::unique_lock lock(mu_);
  return upsert_locked(title, content);
}

void MemoryReservoir::upsert_batch(const std::vector<std::pair<std::string, std::string>>& items) {
  std::unique_lock lock(mu_);
  for (const auto& [t, c] : items) upsert_locked(t, c);
}

PopularityReport MemoryReservoir::popularity(std::string_view query, const TriggerConfig& cfg) const {
  cfg.validate();
  PopularityReport r;
  r.query = std::string(query);
  std::shared_lock lock(mu_);
  if (!entries_.empty()) {
    auto q = embedder_->embed(query);
    for (const auto& e : entries_) {
      double s = embedding::cosine(q, e.title_embedding);
      if (s >= cfg.tau) r.matched_titles.push_back({e.title, s, e.inserted_at});
    }
  }
  std::sort(r.matched_titles.begin(), r.matched_titles.end(), [](const TitleMatch& a, const TitleMatch& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.inserted_at > b.inserted_at;
  });
  r.pop = r.matched_titles.size();
  r.within_boundary = r.pop >= static_cast<std::size_t>(cfg.theta);
  return r;
}

std::vector<KnowledgeInstance> MemoryReservoir::recall_locked(const PopularityReport& report,
                                                              const TriggerConfig& cfg) const {
  std::vector<KnowledgeInstance> out;
  if (!report.within_boundary) return out;
  for (const auto& m : report.matched_titles) {
    if (static_cast<int>(out.size()) >= cfg.max_memory_instances_per_query) break;
    auto it = index_.find(normalize_title_key(m.title));
    if (it == index_.end()) continue;
    const auto& e = entries_[it->second];
    KnowledgeSource src{SourceKind::memory, 0, static_cast<int>(out.size()) + 1, {}};
    out.push_back(KnowledgeInstance::make(e.title, e.content, src));
  }
  return out;
}

std::vector<KnowledgeInstance> MemoryReservoir::recall_knowledge(const PopularityReport& report,
                                                                 const TriggerConfig& cfg) const {
  std::shared_lock lock(mu_);
  return recall_locked(report, cfg);
}

std::vector<KnowledgeInstance> MemoryReservoir::recall_knowledge(std::string_view query,
                                                                 const TriggerConfig& cfg) const {
  return recall_knowledge(popularity(query, cfg), cfg);
}

std::vector<ReservoirEntry> MemoryReservoir::entries() const {
  std::shared_lock lock(mu_);
  auto out = entries_;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.inserted_at < b.inserted_at; });
  return out;
}

std::size_t MemoryReservoir::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void MemoryReservoir::persist(const std::filesystem::path& path) const {
  auto snapshot = entries();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write reservoir " + path.string());
  for (const auto& e : snapshot) {
    nlohmann::ordered_json rec;
    rec["title"] = e.title;
    rec["content"] = e.content;
    rec["seq"] = e.inserted_at;
    out << rec.dump() << '\n';
  }
  if (!out) throw IoError("error writing reservoir " + path.string());
}

void MemoryReservoir::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reservoir " + path.string());

  std::vector<ReservoirEntry> entries;
  std::unordered_map<std::string, std::size_t> index;
  std::uint64_t max_seq = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("reservoir: invalid JSON: ") + e.what(), lineno);
    }
    if (!rec.is_object() || !rec.contains("title") || !rec["title"].is_string() || !rec.contains("content") ||
        !rec["content"].is_string() || !rec.contains("seq") || !rec["seq"].is_number_unsigned()) {
      throw FormatError("reservoir: record needs string title/content and unsigned seq", lineno);
    }
    auto title = text::trim(rec["title"].get<std::string>());
    auto content = rec["content"].get<std::string>();
    auto seq = rec["seq"].get<std::uint64_t>();
    if (title.empty() || text::trim(content).empty()) throw FormatError("reservoir: empty title or content", lineno);
    max_seq = std::max(max_seq, seq);
    auto key = normalize_title_key(title);
    if (auto it = index.find(key); it != index.end()) {
      spdlog::warn("reservoir {}:{}: duplicate title '{}', later record wins", path.string(), lineno, title);
      entries[it->second].content = std::move(content);
      entries[it->second].inserted_at = seq;
      continue;
    }
    ReservoirEntry e;
    e.title = std::move(title);
    e.content = std::move(content);
    e.title_embedding = embedder_->embed(e.title);
    e.inserted_at = seq;
    index.emplace(std::move(key), entries.size());
    entries.push_back(std::move(e));
  }

  std::unique_lock lock(mu_);
  entries_ = std::move(entries);
  index_ = std::move(index);
  next_seq_ = max_seq + 1;
}

std::unique_ptr<MemoryReservoir> MemoryReservoir::clone() const {
  auto out = std::make_unique<MemoryReservoir>(embedder_);
  std::shared_lock lock(mu_);
  out->entries_ = entries_;
  out->index_ = index_;
  out->next_seq_ = next_seq_;
  return out;
}

void MemoryReservoir::compact() {
  std::unique_lock lock(mu_);
  std::vector<std::size_t> order(entries_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return entries_[a].inserted_at < entries_[b].inserted_at; });
  std::uint64_t seq = 0;
  for (auto i : order) entries_[i].inserted_at = ++seq;
  next_seq_ = seq + 1;
}

}  // namespace ragkit::memory
