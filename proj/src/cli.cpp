// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ragkit/config.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/eval.hpp"
#include "ragkit/pipeline.hpp"
#include "ragkit/records.hpp"
#include "ragkit/text.hpp"

namespace ragkit::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Raised for setup problems; `component` goes in front of the message.
struct SetupError : std::runtime_error {
  SetupError(std::string component, const std::string& what)
      : std::runtime_error(what), component(std::move(component)) {}
  std::string component;
};

template <typename Fn>
auto stage(const std::string& component, Fn fn) {
  try {
    return fn();
  } catch (const SetupError&) {
    throw;
  } catch (const std::exception& e) {
    throw SetupError(component, e.what());
  }
}

void init_logging(const std::string& level) {
  auto logger = spdlog::get("ragkit");
  if (!logger) {
    logger = spdlog::stderr_color_mt("ragkit");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(spdlog::level::from_str(level));
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : text::split(s, ",")) {
    auto t = text::trim(part);
    if (t.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || v < 0.0 || v > 1.0) throw CLI::ValidationError("--grid", "'" + t + "' is not in [0, 1]");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return out;
}

ordered_json aggregates_json(const std::string& label, const pipeline::Aggregates& a) {
  ordered_json j;
  j["mode"] = label;
  j["n_questions"] = a.n_questions;
  j["n_failed"] = a.n_failed;
  j["time_cost_ms"] = a.time_cost_ms;
  j["external_knowledge"] = a.external_knowledge;
  j["memory_knowledge"] = a.memory_knowledge;
  j["irrelevant_knowledge"] = a.irrelevant_knowledge;
  j["back_off_count"] = a.back_off_count;
  j["external_searches"] = a.external_searches;
  return j;
}

std::size_t unscripted_misses(const config::Stack& st) {
  if (auto mock = std::dynamic_pointer_cast<llm::ScriptedMockBackend>(st.chat)) return mock->miss_count();
  return 0;
}

struct Common {
  std::string config;
  std::string dataset;
  std::string out;
  std::string reservoir;
  std::size_t workers = 0;
  bool lenient = false;
};

struct Loaded {
  config::RunConfig cfg;
  std::vector<eval::QaItem> items;
  fs::path reservoir;
};

Loaded load_inputs(const Common& c) {
  Loaded l;
  l.cfg = stage("config", [&] { return config::RunConfig::load(c.config); });
  if (c.workers > 0) l.cfg.pipeline.workers = c.workers;
  fs::path dataset = c.dataset.empty() ? l.cfg.dataset : fs::path(c.dataset);
  if (dataset.empty()) throw SetupError("dataset", "no dataset given (--dataset or config 'dataset')");
  l.items = stage("dataset", [&] { return eval::load_dataset(dataset, !c.lenient); });
  if (l.items.empty()) throw SetupError("dataset", dataset.string() + " has no questions");
  if (l.cfg.dataset_tag.empty()) l.cfg.dataset_tag = dataset.stem().string();
  l.reservoir = c.reservoir.empty() ? l.cfg.reservoir : fs::path(c.reservoir);
  return l;
}

struct RunResult {
  std::vector<QaRecord> records;
  ordered_json aggregates = ordered_json::array();
  bool any_failed = false;
};

// Shared by `run` and `record-mocks`.
RunResult execute_runs(Loaded& l, const std::vector<pipeline::RunPlan>& plans, config::Stack& st) {
  pipeline::Pipeline pipe(st.services(), l.cfg.pipeline);
  auto questions = pipeline::to_questions(l.items, l.cfg.dataset_tag);
  RunResult r;
  for (const auto& plan : plans) {
    spdlog::info("running {} over {} questions", plan.label, questions.size());
    auto batch = pipe.run_batch(questions, plan);
    r.any_failed = r.any_failed || batch.aggregates.n_failed > 0;
    r.aggregates.push_back(aggregates_json(plan.label, batch.aggregates));
    for (auto& rec : batch.records) r.records.push_back(std::move(rec));
  }
  return r;
}

std::vector<pipeline::RunPlan> plans_for(const Loaded& l, const std::string& mode_flag) {
  if (!mode_flag.empty()) {
    auto m = stage("cli", [&] { return parse_mode(mode_flag); });
    return {pipeline::RunPlan::for_mode(m)};
  }
  if (!l.cfg.settings.empty()) return l.cfg.settings;
  if (l.cfg.mode) return {pipeline::RunPlan::for_mode(*l.cfg.mode)};
  throw SetupError("config", "no mode given (--mode, config 'mode' or config 'settings')");
}

bool uses_memory(const std::vector<pipeline::RunPlan>& plans) {
  return std::any_of(plans.begin(), plans.end(), [](const auto& p) { return p.memory; });
}

void write_reports(const fs::path& out, const RunResult& r, const Loaded& l, bool ablation) {
  auto reports = eval::evaluate_run(r.records, l.items, l.cfg.dataset_tag);
  auto table = ablation ? eval::format_ablation_table(reports) : eval::format_table(reports);
  write_text(out / "report.txt", table);
  write_text(out / "report.csv", ablation ? eval::to_ablation_csv(reports) : eval::to_csv(reports));
  std::cout << table;
}

int cmd_run(const Common& c, const std::string& mode_flag) {
  auto l = load_inputs(c);
  auto plans = plans_for(l, mode_flag);
  bool memory = uses_memory(plans);
  config::BuildOptions opts;
  opts.with_memory = memory;
  opts.reservoir_path = l.reservoir;
  auto st = stage("backends", [&] { return config::build_stack(l.cfg, opts); });
  ensure_dir(c.out);

  auto r = execute_runs(l, plans, st);
  write_records(fs::path(c.out) / "records.jsonl", r.records);
  ordered_json agg;
  agg["dataset"] = l.cfg.dataset_tag;
  agg["runs"] = r.aggregates;
  agg["unscripted_misses"] = unscripted_misses(st);
  write_text(fs::path(c.out) / "aggregates.json", agg.dump(2) + "\n");
  bool ablation = mode_flag.empty() && !l.cfg.settings.empty();
  write_reports(c.out, r, l, ablation);

  if (memory && !l.reservoir.empty()) st.reservoir->persist(l.reservoir);
  if (auto misses = unscripted_misses(st); misses > 0) {
    spdlog::warn("{} prompts had no scripted response", misses);
  }
  return r.any_failed ? kExitPartial : kExitOk;
}

int cmd_record_mocks(const Common& c, const std::string& mode_flag) {
  auto l = load_inputs(c);
  auto plans = plans_for(l, mode_flag);
  config::BuildOptions opts;
  opts.with_memory = uses_memory(plans);
  opts.reservoir_path = l.reservoir;
  std::shared_ptr<llm::RecordingBackend> recorder;
  opts.chat_hook = [&](std::shared_ptr<llm::ChatBackend> inner) {
    recorder = std::make_shared<llm::RecordingBackend>(std::move(inner));
    return recorder;
  };
  auto st = stage("backends", [&] { return config::build_stack(l.cfg, opts); });
  ensure_dir(c.out);
  auto r = execute_runs(l, plans, st);
  write_records(fs::path(c.out) / "records.jsonl", r.records);
  recorder->write(fs::path(c.out) / "mock_script.jsonl");
  std::cout << "recorded " << recorder->entries().size() << " prompts to "
            << (fs::path(c.out) / "mock_script.jsonl").string() << "\n";
  return r.any_failed ? kExitPartial : kExitOk;
}

int cmd_eval(const std::string& records_path, const std::string& dataset, const std::string& out,
             const std::string& tag) {
  auto items = stage("dataset", [&] { return eval::load_dataset(dataset); });
  auto records = stage("records", [&] { return read_records(records_path); });
  auto reports = stage("eval", [&] {
    return eval::evaluate_run(records, items, tag.empty() ? fs::path(dataset).stem().string() : tag);
  });
  bool ablation = std::any_of(records.begin(), records.end(), [](const QaRecord& r) {
    return r.mode.find('/') != std::string::npos;
  });
  auto table = ablation ? eval::format_ablation_table(reports) : eval::format_table(reports);
  ensure_dir(out);
  write_text(fs::path(out) / "report.txt", table);
  write_text(fs::path(out) / "report.csv", ablation ? eval::to_ablation_csv(reports) : eval::to_csv(reports));
  std::cout << table;
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& grid_text, int theta) {
  auto grid = parse_grid(grid_text);
  auto l = load_inputs(c);
  config::BuildOptions opts;
  opts.with_memory = true;
  opts.reservoir_path = l.reservoir;
  auto st = stage("backends", [&] { return config::build_stack(l.cfg, opts); });
  auto rows = pipeline::sweep_tau(st.services(), l.cfg.pipeline, *st.reservoir, l.items, grid, theta);
  auto csv = pipeline::sweep_csv(rows);
  ensure_dir(c.out);
  write_text(fs::path(c.out) / "tau_sweep.csv", csv);
  std::cout << csv;
  bool failed = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.aggregates.n_failed > 0; });
  return failed ? kExitPartial : kExitOk;
}

int cmd_plateau(const Common& c, std::size_t max_snippets, const std::vector<std::string>& order_names) {
  std::vector<retrieval::ArrangementOrder> orders;
  for (const auto& o : order_names) orders.push_back(stage("cli", [&] { return retrieval::parse_arrangement(o); }));
  auto l = load_inputs(c);
  auto st = stage("backends", [&] { return config::build_stack(l.cfg, {}); });
  pipeline::Pipeline pipe(st.services(), l.cfg.pipeline);
  std::vector<std::size_t> counts(max_snippets);
  for (std::size_t i = 0; i < max_snippets; ++i) counts[i] = i + 1;
  auto rows = pipe.plateau_study(l.items, counts, orders);
  auto csv = pipeline::plateau_csv(rows);
  ensure_dir(c.out);
  write_text(fs::path(c.out) / "plateau.csv", csv);
  std::cout << csv;
  return kExitOk;
}

std::unique_ptr<memory::MemoryReservoir> open_reservoir(const std::string& path, const std::string& config_path) {
  std::shared_ptr<const embedding::Embedder> embedder;
  if (!config_path.empty()) {
    auto cfg = stage("config", [&] { return config::RunConfig::load(config_path); });
    embedder = stage("embedding", [&] { return config::make_embedder(cfg); });
  } else {
    embedder = std::make_shared<embedding::HashingEmbedder>();
  }
  auto r = std::make_unique<memory::MemoryReservoir>(embedder);
  stage("reservoir", [&] {
    r->load(path);
    return 0;
  });
  return r;
}

int cmd_inspect(const std::string& path, const std::string& config_path, std::size_t limit) {
  auto r = open_reservoir(path, config_path);
  auto entries = r->entries();
  std::cout << "entries: " << entries.size() << "\n";
  std::size_t shown = 0;
  for (const auto& e : entries) {
    if (limit > 0 && shown++ >= limit) break;
    std::cout << e.inserted_at << "\t" << e.title << "\t" << e.content.size() << " bytes\n";
  }
  return kExitOk;
}

int cmd_compact(const std::string& path, const std::string& config_path) {
  auto r = open_reservoir(path, config_path);
  r->compact();
  r->persist(path);
  std::cout << "compacted " << r->size() << " entries\n";
  return kExitOk;
}

}  // namespace

int run_app(const std::vector<std::string>& args) {
  CLI::App app{"Retrieval-augmented QA pipelines with query rewriting, knowledge filtering and a memory reservoir",
               "ragkit"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  auto add_common = [](CLI::App* sub, Common& c, bool out_required = true) {
    sub->add_option("--config", c.config, "Run manifest (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--dataset", c.dataset, "Dataset JSONL; overrides the manifest")->check(CLI::ExistingFile);
    auto* o = sub->add_option("--out", c.out, "Output directory");
    if (out_required) o->required();
    sub->add_option("--reservoir", c.reservoir, "Memory reservoir file; overrides the manifest");
    sub->add_option("--workers", c.workers, "Questions in flight; overrides the manifest")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--lenient", c.lenient, "Skip malformed dataset lines instead of failing");
  };

  Common run_c;
  std::string run_mode;
  auto* run = app.add_subcommand("run", "Answer a dataset with one pipeline mode or the configured settings");
  add_common(run, run_c);
  run->add_option("--mode", run_mode, "direct|rrr|rplus_rr|rplus_rfr|memory_augmented");

  std::string ev_records, ev_dataset, ev_out, ev_tag;
  auto* ev = app.add_subcommand("eval", "Score a records file against a dataset");
  ev->add_option("--records", ev_records, "records.jsonl from a run")->required()->check(CLI::ExistingFile);
  ev->add_option("--dataset", ev_dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", ev_out, "Output directory")->required();
  ev->add_option("--tag", ev_tag, "Dataset column value");

  Common sw_c;
  std::string grid = "0.2,0.4,0.6,0.8,1.0";
  int theta = 3;
  auto* sw = app.add_subcommand("sweep-tau", "Memory-augmented runs over a grid of similarity thresholds");
  add_common(sw, sw_c);
  sw->add_option("--grid", grid, "Comma-separated tau values in [0, 1]")->capture_default_str();
  sw->add_option("--theta", theta, "Popularity threshold")->check(CLI::PositiveNumber)->capture_default_str();

  Common pl_c;
  std::size_t max_snippets = 30;
  std::vector<std::string> orders{"sequential", "mixed"};
  auto* pl = app.add_subcommand("plateau-study", "Answer Recall and Snippet Precision against snippet count");
  add_common(pl, pl_c);
  pl->add_option("--max-snippets", max_snippets, "Largest snippet count; curves cover 1..N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pl->add_option("--orders", orders, "sequential,mixed")->delimiter(',')->capture_default_str();

  auto* res = app.add_subcommand("reservoir", "Inspect or compact a memory reservoir file");
  res->require_subcommand(1);
  std::string res_path, res_config;
  std::size_t res_limit = 20;
  auto* inspect = res->add_subcommand("inspect", "List entries");
  inspect->add_option("--path", res_path, "Reservoir file")->required()->check(CLI::ExistingFile);
  inspect->add_option("--config", res_config, "Manifest whose embedding settings to use")->check(CLI::ExistingFile);
  inspect->add_option("--limit", res_limit, "Entries to list, 0 for all")->capture_default_str();
  auto* compact = res->add_subcommand("compact", "Renumber sequence numbers and rewrite the file");
  compact->add_option("--path", res_path, "Reservoir file")->required()->check(CLI::ExistingFile);
  compact->add_option("--config", res_config, "Manifest whose embedding settings to use")->check(CLI::ExistingFile);

  Common rec_c;
  std::string rec_mode;
  auto* rec = app.add_subcommand("record-mocks", "Run against the configured backend and save every prompt/response");
  add_common(rec, rec_c);
  rec->add_option("--mode", rec_mode, "direct|rrr|rplus_rr|rplus_rfr|memory_augmented");

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  init_logging(log_level);

  try {
    if (*run) return cmd_run(run_c, run_mode);
    if (*ev) return cmd_eval(ev_records, ev_dataset, ev_out, ev_tag);
    if (*sw) return cmd_sweep(sw_c, grid, theta);
    if (*pl) return cmd_plateau(pl_c, max_snippets, orders);
    if (*inspect) return cmd_inspect(res_path, res_config, res_limit);
    if (*compact) return cmd_compact(res_path, res_config);
    if (*rec) return cmd_record_mocks(rec_c, rec_mode);
  } catch (const SetupError& e) {
    std::cerr << "ragkit: " << e.component << ": " << e.what() << "\n";
    return kExitFatal;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "ragkit: cli: " << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "ragkit: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}

int run_app(int argc, const char* const* argv) {
  return run_app(std::vector<std::string>(argv, argv + argc));
}

}  // namespace ragkit::cli
