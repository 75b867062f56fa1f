// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "ragkit/concurrency.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit::pipeline {

std::string_view to_string(QuestionForm q) { return q == QuestionForm::original ? "original" : "rewritten"; }

std::string_view to_string(KnowledgeUse k) {
  switch (k) {
    case KnowledgeUse::none: return "none";
    case KnowledgeUse::all: return "all";
    case KnowledgeUse::filtered: return "filtered";
  }
  return "none";
}

std::string_view to_string(ContentMode c) { return c == ContentMode::snippet ? "snippet" : "page"; }

QuestionForm parse_question_form(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "original") return QuestionForm::original;
  if (l == "rewritten") return QuestionForm::rewritten;
  throw std::invalid_argument("unknown question form '" + std::string(s) + "' (original|rewritten)");
}

KnowledgeUse parse_knowledge_use(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "none") return KnowledgeUse::none;
  if (l == "all") return KnowledgeUse::all;
  if (l == "filtered") return KnowledgeUse::filtered;
  throw std::invalid_argument("unknown knowledge use '" + std::string(s) + "' (none|all|filtered)");
}

ContentMode parse_content_mode(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "snippet") return ContentMode::snippet;
  if (l == "page") return ContentMode::page;
  throw std::invalid_argument("unknown content mode '" + std::string(s) + "' (snippet|page)");
}

TimingMode parse_timing_mode(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "wall") return TimingMode::wall;
  if (l == "simulated") return TimingMode::simulated;
  throw std::invalid_argument("unknown timing mode '" + std::string(s) + "' (wall|simulated)");
}

ReservoirUpdate parse_reservoir_update(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "after_batch") return ReservoirUpdate::after_batch;
  if (l == "per_question") return ReservoirUpdate::per_question;
  throw std::invalid_argument("unknown reservoir update '" + std::string(s) + "' (after_batch|per_question)");
}

RunPlan RunPlan::for_mode(PipelineMode m) {
  RunPlan p;
  p.label = std::string(to_string(m));
  switch (m) {
    case PipelineMode::direct:
      break;
    case PipelineMode::rrr:
      p.rewrite = RewriteKind::single;
      p.knowledge = KnowledgeUse::all;
      break;
    case PipelineMode::rplus_rr:
      p.rewrite = RewriteKind::multi;
      p.question = QuestionForm::rewritten;
      p.knowledge = KnowledgeUse::all;
      break;
    case PipelineMode::rplus_rfr:
      p.rewrite = RewriteKind::multi;
      p.question = QuestionForm::rewritten;
      p.knowledge = KnowledgeUse::filtered;
      break;
    case PipelineMode::memory_augmented:
      p.rewrite = RewriteKind::multi;
      p.question = QuestionForm::rewritten;
      p.knowledge = KnowledgeUse::filtered;
      p.memory = true;
      break;
  }
  return p;
}

RunPlan RunPlan::ablation(QuestionForm q, KnowledgeUse k) {
  RunPlan p;
  p.question = q;
  p.knowledge = k;
  // Original question without knowledge is the plain reader; nothing to rewrite.
  p.rewrite = (q == QuestionForm::original && k == KnowledgeUse::none) ? RewriteKind::none : RewriteKind::multi;
  p.label = std::string(to_string(q)) + "/" + std::string(to_string(k));
  return p;
}

void PipelineConfig::validate() const {
  if (top_n < 1) throw std::invalid_argument("retrieval: top_n must be >= 1");
  if (cap < 1) throw std::invalid_argument("retrieval: cap must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (query_parallelism < 1) throw std::invalid_argument("query_parallelism must be >= 1");
  bm25.validate();
  trigger.validate();
}

Pipeline::Pipeline(Services services, PipelineConfig cfg) : svc_(services), cfg_(std::move(cfg)) {
  cfg_.validate();
  require(svc_.gateway != nullptr, "an LLM gateway");
}

void Pipeline::require(bool ok, const char* what) const {
  if (!ok) throw ConfigError(std::string("pipeline: this run needs ") + what);
}

retrieval::SearchResultGroup Pipeline::external_group(
    const std::string& query, int query_index, bool pages,
    std::vector<std::pair<std::string, std::string>>& fetched) const {
  auto group = retrieval::search(*svc_.search, query, cfg_.top_n, query_index);
  if (pages) {
    std::vector<std::uint64_t> fetch_latency(group.instances.size(), 0);
    parallel_for(group.instances.size(), cfg_.query_parallelism, [&](std::size_t i) {
      auto& k = group.instances[i];
      try {
        auto page = svc_.pages->fetch(k.source.url);
        fetch_latency[i] = page.latency_ms;
        auto title = retrieval::html_title(page.html);
        if (title.empty()) title = k.title;
        auto content = retrieval::distill_text(retrieval::html_to_text(page.html), query, cfg_.bm25);
        k = KnowledgeInstance::make(std::move(title), std::move(content), k.source);
      } catch (const FetchError& e) {
        spdlog::warn("page fetch failed for {}: {}; keeping the snippet", k.source.url, e.what());
      } catch (const EmptyPage& e) {
        spdlog::info("no text in {}; keeping the snippet", k.source.url);
      }
    });
    group.latency_ms += fetch_latency.empty() ? 0 : *std::max_element(fetch_latency.begin(), fetch_latency.end());
  }
  for (const auto& k : group.instances) fetched.emplace_back(k.title, k.content);
  return group;
}

Pipeline::Retrieved Pipeline::retrieve(const std::vector<std::string>& queries, bool use_memory) const {
  if (use_memory) require(svc_.reservoir != nullptr, "a memory reservoir");
  bool pages = svc_.pages != nullptr && (use_memory || cfg_.content == ContentMode::page);
  if (cfg_.content == ContentMode::page) require(svc_.pages != nullptr, "a page source");

  struct Slot {
    retrieval::SearchResultGroup group;
    bool from_memory = false;
    std::vector<std::pair<std::string, std::string>> fetched;
  };
  std::vector<Slot> slots(queries.size());
  parallel_for(queries.size(), cfg_.query_parallelism, [&](std::size_t i) {
    const auto& q = queries[i];
    int qi = static_cast<int>(i);
    if (use_memory) {
      memory::PopularityReport report;
      try {
        report = svc_.reservoir->popularity(q, cfg_.trigger);
      } catch (const EmptyTextError&) {
        report.query = q;  // nothing to embed; treated as unpopular
      }
      if (report.within_boundary) {
        auto recalled = svc_.reservoir->recall_knowledge(report, cfg_.trigger);
        for (auto& k : recalled) k.source.query_index = qi;
        slots[i].group = {q, qi, std::move(recalled), 0};
        slots[i].from_memory = true;
        return;
      }
    }
    require(svc_.search != nullptr, "a search backend");
    slots[i].group = external_group(q, qi, pages, slots[i].fetched);
  });

  Retrieved out;
  for (auto& s : slots) {
    (s.from_memory ? out.memory : out.external) += s.group.instances.size();
    if (!s.from_memory) ++out.external_searches;
    out.latency_ms = std::max(out.latency_ms, s.group.latency_ms);
    for (auto& f : s.fetched) out.fetched.push_back(std::move(f));
    out.groups.push_back(std::move(s.group));
  }
  return out;
}

QuestionOutcome Pipeline::run_question(const rewriter::OriginalQuestion& p, const RunPlan& plan) const {
  auto start = std::chrono::steady_clock::now();
  QuestionOutcome out;
  auto& rec = out.record;
  rec.question_id = p.id;
  rec.mode = plan.label;
  rec.question_form = std::string(to_string(plan.question));
  rec.knowledge_use = std::string(to_string(plan.knowledge));

  std::uint64_t latency = 0;
  try {
    std::string s = p.text;
    if (plan.rewrite != RewriteKind::none) {
      require(svc_.rewriter != nullptr, "a query rewriter");
      std::uint64_t l = 0;
      auto r = plan.rewrite == RewriteKind::single ? svc_.rewriter->rewrite_single_query(p, l)
                                                   : svc_.rewriter->rewrite(p, l);
      latency += l;
      s = r.rewritten_question;
      rec.rewritten_question = r.rewritten_question;
      rec.queries = r.queries;
    }

    std::vector<KnowledgeInstance> knowledge;
    if (plan.knowledge != KnowledgeUse::none) {
      require(plan.rewrite != RewriteKind::none, "queries from the rewriter");
      auto got = retrieve(rec.queries, plan.memory);
      latency += got.latency_ms;
      rec.external_knowledge_count = got.external;
      rec.memory_knowledge_count = got.memory;
      out.external_searches = got.external_searches;
      out.fetched = std::move(got.fetched);
      auto arranged = retrieval::arrange(got.groups, cfg_.order, cfg_.cap);
      if (plan.knowledge == KnowledgeUse::filtered) {
        require(svc_.filter != nullptr, "a knowledge filter");
        auto verdict = svc_.filter->filter(s, arranged);
        latency += verdict.latency_ms;
        rec.irrelevant_knowledge_count = verdict.irrelevant_count();
        rec.back_off_used = verdict.back_off;
        knowledge = std::move(verdict.retained);
      } else {
        knowledge = std::move(arranged);
      }
    }

    const auto& question = plan.question == QuestionForm::original ? p.text : s;
    auto prompt = reader::assemble_prompt(question, knowledge, cfg_.reader);
    std::uint64_t l = 0;
    rec.response = reader::Reader(*svc_.gateway).answer(prompt, l);
    latency += l;
    out.reader_knowledge = std::move(prompt.knowledge_block);
  } catch (const std::exception& e) {
    spdlog::error("question {} ({}) failed: {}", p.id, plan.label, e.what());
    rec.failed = true;
    rec.error = e.what();
    rec.response.clear();
    out.fetched.clear();
    out.reader_knowledge.clear();
  }

  rec.backend_latency_ms = latency;
  if (cfg_.timing == TimingMode::simulated) {
    rec.time_cost_ms = latency;
  } else {
    auto elapsed = std::chrono::steady_clock::now() - start;
    rec.time_cost_ms = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
  }
  return out;
}

Aggregates aggregate(const std::vector<QaRecord>& records) {
  Aggregates a;
  a.n_questions = records.size();
  std::uint64_t time = 0, ext = 0, mem = 0, irr = 0;
  for (const auto& r : records) {
    if (r.failed) {
      ++a.n_failed;
      continue;
    }
    time += r.time_cost_ms;
    ext += r.external_knowledge_count;
    mem += r.memory_knowledge_count;
    irr += r.irrelevant_knowledge_count;
    if (r.back_off_used) ++a.back_off_count;
  }
  auto ok = a.n_questions - a.n_failed;
  if (ok > 0) {
    auto n = static_cast<double>(ok);
    a.time_cost_ms = static_cast<double>(time) / n;
    a.external_knowledge = static_cast<double>(ext) / n;
    a.memory_knowledge = static_cast<double>(mem) / n;
    a.irrelevant_knowledge = static_cast<double>(irr) / n;
  }
  return a;
}

BatchResult Pipeline::run_batch(const std::vector<rewriter::OriginalQuestion>& questions, const RunPlan& plan) const {
  if (questions.empty()) throw std::invalid_argument("run_batch: dataset is empty");
  std::vector<QuestionOutcome> outcomes(questions.size());
  bool write_memory = plan.memory && svc_.reservoir != nullptr;
  parallel_for(questions.size(), cfg_.workers, [&](std::size_t i) {
    outcomes[i] = run_question(questions[i], plan);
    if (write_memory && cfg_.reservoir_update == ReservoirUpdate::per_question && !outcomes[i].record.failed) {
      svc_.reservoir->upsert_batch(outcomes[i].fetched);
    }
  });
  if (write_memory && cfg_.reservoir_update == ReservoirUpdate::after_batch) {
    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return outcomes[a].record.question_id < outcomes[b].record.question_id;
    });
    for (auto i : order) {
      if (!outcomes[i].record.failed) svc_.reservoir->upsert_batch(outcomes[i].fetched);
    }
  }

  BatchResult out;
  out.records.reserve(outcomes.size());
  std::size_t searches = 0;
  for (auto& o : outcomes) {
    if (!o.record.failed) searches += o.external_searches;
    out.records.push_back(std::move(o.record));
  }
  out.aggregates = aggregate(out.records);
  out.aggregates.external_searches = searches;
  return out;
}

std::vector<PlateauRow> Pipeline::plateau_study(const std::vector<eval::QaItem>& items,
                                                const std::vector<std::size_t>& snippet_counts,
                                                const std::vector<retrieval::ArrangementOrder>& orders) const {
  if (items.empty()) throw std::invalid_argument("plateau_study: no questions");
  for (auto c : snippet_counts) {
    if (c == 0) throw std::invalid_argument("plateau_study: snippet counts must be >= 1");
  }
  require(svc_.rewriter != nullptr, "a query rewriter");
  require(svc_.search != nullptr, "a search backend");

  std::vector<std::vector<retrieval::SearchResultGroup>> per_item(items.size());
  parallel_for(items.size(), cfg_.workers, [&](std::size_t i) {
    auto r = svc_.rewriter->rewrite({items[i].id, items[i].question, {}});
    for (std::size_t q = 0; q < r.queries.size(); ++q) {
      per_item[i].push_back(retrieval::search(*svc_.search, r.queries[q], cfg_.top_n, static_cast<int>(q)));
    }
  });

  std::vector<PlateauRow> rows;
  auto n = static_cast<double>(items.size());
  for (auto order : orders) {
    for (auto count : snippet_counts) {
      PlateauRow row;
      row.snippet_count = count;
      row.order = order;
      for (std::size_t i = 0; i < items.size(); ++i) {
        auto ks = retrieval::arrange(per_item[i], order, count);
        row.answer_recall += eval::answer_recall(ks, items[i].answers);
        row.snippet_precision += eval::snippet_precision(ks, items[i].answers);
      }
      row.answer_recall /= n;
      row.snippet_precision /= n;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<SweepRow> sweep_tau(const Services& services, PipelineConfig cfg, const memory::MemoryReservoir& seed,
                                const std::vector<eval::QaItem>& items, const std::vector<double>& grid, int theta) {
  auto questions = to_questions(items, "");
  auto plan = RunPlan::for_mode(PipelineMode::memory_augmented);
  std::vector<SweepRow> rows;
  for (double tau : grid) {
    cfg.trigger.tau = tau;
    cfg.trigger.theta = theta;
    auto reservoir = seed.clone();
    auto svc = services;
    svc.reservoir = reservoir.get();
    Pipeline pipe(svc, cfg);
    auto batch = pipe.run_batch(questions, plan);
    SweepRow row;
    row.tau = tau;
    row.aggregates = batch.aggregates;
    row.hit_rate_pct = eval::evaluate_run(batch.records, items).front().hit_rate_pct;
    spdlog::info("tau {:.2f}: external {:.2f} memory {:.2f} irrelevant {:.2f} hit {:.2f}", tau,
                 row.aggregates.external_knowledge, row.aggregates.memory_knowledge,
                 row.aggregates.irrelevant_knowledge, row.hit_rate_pct);
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  using eval::fixed2;
  std::string out = "tau,time_cost_s,external_knowledge,memory_knowledge,irrelevant_knowledge,hit_rate\n";
  for (const auto& r : rows) {
    const auto& a = r.aggregates;
    out += fixed2(r.tau) + "," + fixed2(a.time_cost_ms / 1000.0) + "," + fixed2(a.external_knowledge) + "," +
           fixed2(a.memory_knowledge) + "," + fixed2(a.irrelevant_knowledge) + "," + fixed2(r.hit_rate_pct) + "\n";
  }
  return out;
}

std::string plateau_csv(const std::vector<PlateauRow>& rows) {
  std::string out = "snippet_count,order,answer_recall,snippet_precision\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%s,%.4f,%.4f\n", r.snippet_count,
                  std::string(retrieval::to_string(r.order)).c_str(), r.answer_recall, r.snippet_precision);
    out += buf;
  }
  return out;
}

std::vector<rewriter::OriginalQuestion> to_questions(const std::vector<eval::QaItem>& items,
                                                     const std::string& dataset_tag) {
  std::vector<rewriter::OriginalQuestion> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back({it.id, it.question, dataset_tag});
  return out;
}

}  // namespace ragkit::pipeline
