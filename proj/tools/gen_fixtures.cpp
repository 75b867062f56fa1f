// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

// Regenerates everything under fixtures/: a small synthetic world of places
// with facts, its web pages and search corpora, datasets, a seed memory
// reservoir, and scripted LLM replies recorded from a rule-based stand-in
// model driven through the real pipeline.
//
//   gen_fixtures <fixtures-dir>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ragkit/config.hpp"
#include "ragkit/eval.hpp"
#include "ragkit/pipeline.hpp"
#include "ragkit/records.hpp"
#include "ragkit/text.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace ragkit;

namespace {

struct Fact {
  std::string attr;
  std::string value;
};

struct Page {
  std::string kind;  // "" for the main page
  std::string title;
  std::string url;
  std::string slug;
  std::vector<std::string> sentences;
  std::string snippet;
};

struct Topic {
  std::string name;
  std::vector<Fact> facts;
  std::vector<Page> pages;
};

struct QuestionSpec {
  std::string id;
  std::string original;
  std::string rewritten;
  std::vector<std::string> queries;
  std::vector<std::string> answers;
  std::string wrong;  // a plausible wrong answer
};

const std::vector<std::string> kAttrs = {
    "founding year", "height",        "founder",    "annual visitor count", "total area",
    "chief architect", "nearest river", "official color", "sister city",    "oldest artifact"};

const std::vector<std::string> kKinds = {"", "history", "geography", "culture", "economy"};

const std::vector<std::string> kFillers = {
    "Visitors usually arrive by the northern road.",
    "The surrounding hills are covered in pine forest.",
    "Local guides offer walking tours in the summer months.",
    "Several festivals take place there every autumn.",
    "The site appears on many regional postcards.",
    "Its archives were digitised during the last decade.",
    "A small museum nearby documents daily life in earlier centuries.",
    "The winters are long and the summers are mild.",
    "Restoration work has continued for many years.",
    "Photographs from the early period show a quieter place.",
    "Many residents work in farming and crafts.",
    "The regional council publishes a yearly report about it.",
    "Schools often organise trips there for older pupils.",
    "A railway line once connected it with the coast.",
    "Travel writers have described it as calm and orderly."};

const std::vector<std::string> kSyllables = {"vel", "mor", "an", "tis", "qua", "ri", "don", "el", "ka", "zor",
                                             "bel", "lin", "thra", "os", "ur", "ne", "sa", "gor", "pil", "ven"};
const std::vector<std::string> kPlaceKinds = {"Valley", "Bridge",  "Abbey",   "Harbor", "Observatory",
                                              "Canal",  "Library", "Fortress", "Garden", "Tower"};
const std::vector<std::string> kColors = {"teal", "amber", "crimson", "indigo", "ochre", "silver", "olive", "violet"};
const std::vector<std::string> kArtifacts = {"bronze bell", "carved lintel", "painted map", "iron key",
                                             "stone tablet", "glass lantern"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
  int range(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::mt19937_64 eng_;
};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string slugify(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

std::string word(Rng& rng, int syllables) {
  std::string w;
  for (int i = 0; i < syllables; ++i) w += kSyllables[rng.pick(kSyllables.size())];
  return capitalize(w);
}

std::string person(Rng& rng) { return word(rng, 2) + " " + word(rng, 2); }

std::string value_for(const std::string& attr, Rng& rng) {
  if (attr == "founding year") return std::to_string(rng.range(1150, 1890));
  if (attr == "height") return std::to_string(rng.range(12, 480)) + " meters";
  if (attr == "founder" || attr == "chief architect") return person(rng);
  if (attr == "annual visitor count") return std::to_string(rng.range(20, 900)) + " thousand";
  if (attr == "total area") return std::to_string(rng.range(3, 95)) + " hectares";
  if (attr == "nearest river") return word(rng, 2) + " River";
  if (attr == "official color") return kColors[rng.pick(kColors.size())];
  if (attr == "sister city") return word(rng, 3);
  return kArtifacts[rng.pick(kArtifacts.size())];
}

std::vector<Topic> make_topics(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Topic> topics;
  std::set<std::string> used;
  while (topics.size() < n) {
    Topic t;
    // Vary the token count of names so title similarity varies.
    int shape = static_cast<int>(topics.size() % 3);
    t.name = word(rng, 2) + (shape == 0 ? "" : " " + kPlaceKinds[rng.pick(kPlaceKinds.size())]);
    if (shape == 2) t.name = word(rng, 1) + " " + t.name;
    if (!used.insert(text::to_lower(t.name)).second) continue;
    for (const auto& a : kAttrs) t.facts.push_back({a, value_for(a, rng)});
    auto slug = slugify(t.name);
    for (std::size_t k = 0; k < kKinds.size(); ++k) {
      Page p;
      p.kind = kKinds[k];
      p.title = p.kind.empty() ? t.name : t.name + " " + p.kind;
      p.slug = slug + (p.kind.empty() ? "" : "-" + p.kind);
      p.url = "https://pages.fixture.test/" + slug + "/" + (p.kind.empty() ? "main" : p.kind);
      // Facts k and k+5 live on page k.
      const auto& f1 = t.facts[k];
      const auto& f2 = t.facts[k + 5];
      auto fact = [&](const Fact& f) { return "The " + f.attr + " of " + t.name + " is " + f.value + "."; };
      auto filler = [&] { return kFillers[rng.pick(kFillers.size())]; };
      p.sentences = {filler(), fact(f1), filler(), filler(), filler(), fact(f2), filler(), filler()};
      p.snippet = t.name + (p.kind.empty() ? "" : " " + p.kind) + ": " + fact(f1) + " " + p.sentences[0];
      t.pages.push_back(std::move(p));
    }
    topics.push_back(std::move(t));
  }
  return topics;
}

std::string page_html(const Page& p, const std::string& topic) {
  std::string h = "<!DOCTYPE html>\n<html><head><title>" + p.title +
                  "</title>\n<style>body { font-family: serif; }</style></head>\n<body>\n<h1>" + p.title +
                  "</h1>\n<p>";
  for (std::size_t i = 0; i < p.sentences.size(); ++i) {
    if (i == 4) h += "</p>\n<p>";
    if (i % 4) h += " ";
    h += p.sentences[i];
  }
  h += "</p>\n<script>var visits = 0;</script>\n<p class=\"footer\">Part of the " + topic +
       " collection &amp; archive.</p>\n</body></html>\n";
  return h;
}

QuestionSpec main_question(const Topic& t, std::size_t a, const std::string& id, const std::string& wrong) {
  const auto& f = t.facts[a];
  static const std::vector<std::string> forms = {"so what's the {a} of {t}?", "{t}... {a}? anyone know",
                                                 "i keep forgetting the {a} for {t}"};
  auto fill = [&](std::string s) {
    auto rep = [&](const std::string& k, const std::string& v) {
      for (auto pos = s.find(k); pos != std::string::npos; pos = s.find(k)) s.replace(pos, k.size(), v);
    };
    rep("{a}", f.attr);
    rep("{t}", t.name);
    return s;
  };
  QuestionSpec q;
  q.id = id;
  q.original = fill(forms[a % forms.size()]);
  q.rewritten = "What is the " + f.attr + " of " + t.name + "?";
  q.queries = {t.name + " " + f.attr, t.name + " overview", f.attr + " of " + t.name + " facts"};
  q.answers = {f.value};
  q.wrong = eval::normalize(wrong) == eval::normalize(f.value) ? "none of those" : wrong;
  return q;
}

QuestionSpec prior_question(const Topic& t, std::size_t a, const std::string& id) {
  const auto& f = t.facts[a];
  QuestionSpec q;
  q.id = id;
  q.original = "tell me the " + f.attr + " of " + t.name;
  q.rewritten = "Which " + f.attr + " does " + t.name + " have?";
  q.queries = {t.name + " " + f.attr + " details", t.name + " background", "about " + t.name};
  q.answers = {f.value};
  q.wrong = "unknown";
  return q;
}

// ---- stand-in model ---------------------------------------------------------

std::string between(const std::string& s, const std::string& open, const std::string& close) {
  auto b = s.find(open);
  if (b == std::string::npos) return {};
  b += open.size();
  auto e = close.empty() ? std::string::npos : s.find(close, b);
  return s.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

class Registry {
 public:
  void add(const QuestionSpec& q) {
    specs_.push_back(q);
  }
  void freeze() {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      by_text_[specs_[i].original] = i;
      by_text_[specs_[i].rewritten] = i;
    }
  }
  const QuestionSpec* find(const std::string& text) const {
    auto it = by_text_.find(text::trim(text));
    return it == by_text_.end() ? nullptr : &specs_[it->second];
  }

 private:
  std::vector<QuestionSpec> specs_;
  std::map<std::string, std::size_t> by_text_;
};

bool mentions_answer(const std::string& knowledge, const QuestionSpec& q) {
  auto k = eval::normalize(knowledge);
  return std::any_of(q.answers.begin(), q.answers.end(),
                     [&](const std::string& a) { return k.find(eval::normalize(a)) != std::string::npos; });
}

class StandInModel : public llm::ChatBackend {
 public:
  explicit StandInModel(const Registry& reg) : reg_(reg) {}

  llm::ChatResponse send(const llm::ChatRequest& req) override {
    llm::ChatResponse r;
    r.text = reply(req.user_text);
    return r;
  }

 private:
  std::string reply(const std::string& prompt) const {
    if (prompt.find("[Original Question]:") != std::string::npos) {
      auto q = reg_.find(between(prompt, "[Original Question]:\n", "\n\n[Examples]:"));
      if (!q) return "I could not rewrite this question.";
      return rewriter::serialize_rewrite(q->rewritten, q->queries);
    }
    if (prompt.find("NLI problem") != std::string::npos) {
      auto q = reg_.find(between(prompt, "[Question]:\n", "\n\n[Knowledge]:"));
      auto knowledge = between(prompt, "[Knowledge]:\n", "\n\n[Format]:");
      if (!q) return "No question to judge against.**neutral";
      if (mentions_answer(knowledge, *q)) return "The knowledge states the answer directly.**entailment";
      if (text::fnv1a64(knowledge) % 7 == 0) return "The knowledge points to a different subject.**contradiction";
      return "The knowledge does not give the requested detail.**neutral";
    }
    auto question = between(prompt, "[Question]:\n", "\n\n[");
    auto q = reg_.find(question);
    if (!q) return "I don't know.";
    auto knowledge = between(prompt, "[Knowledge]:", "\n\n[Format]:");
    if (!knowledge.empty() && mentions_answer(knowledge, *q)) {
      return q->answers.front() + ". The provided knowledge states this.";
    }
    // Recall without evidence: right for some questions, more often when the
    // question is stated clearly.
    bool clear = question == q->rewritten;
    auto h = text::fnv1a64(q->id);
    if (h % (clear ? 3 : 5) == 0) return q->answers.front() + ".";
    return "Probably " + q->wrong + ", though I am not certain.";
  }

  const Registry& reg_;
};

// ---- writers ---------------------------------------------------------------

void write_json_lines(const fs::path& path, const std::vector<ordered_json>& recs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& r : recs) out << r.dump() << '\n';
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
}

ordered_json hit_json(const std::string& title, const std::string& snippet, const std::string& url) {
  ordered_json h;
  h["title"] = title;
  h["snippet"] = snippet;
  h["url"] = url;
  return h;
}

std::vector<eval::QaItem> to_items(const std::vector<QuestionSpec>& qs) {
  std::vector<eval::QaItem> out;
  for (const auto& q : qs) out.push_back({q.id, q.original, q.answers});
  return out;
}

// Every query of a topic returns that topic's pages, rotated per query.
std::vector<ordered_json> corpus_for(const std::vector<Topic>& topics, const std::vector<QuestionSpec>& qs,
                                     const std::map<std::string, std::size_t>& topic_of_question,
                                     std::size_t per_query) {
  std::map<std::string, ordered_json> by_query;
  for (const auto& q : qs) {
    const auto& t = topics[topic_of_question.at(q.id)];
    for (const auto& query : q.queries) {
      if (by_query.count(query)) continue;
      auto rot = text::fnv1a64(query) % t.pages.size();
      ordered_json rec;
      rec["query"] = query;
      rec["results"] = ordered_json::array();
      for (std::size_t i = 0; i < std::min(per_query, t.pages.size()); ++i) {
        const auto& p = t.pages[(i + rot) % t.pages.size()];
        rec["results"].push_back(hit_json(p.kind.empty() ? p.title + " - Overview" : p.title, p.snippet, p.url));
      }
      by_query[query] = std::move(rec);
    }
  }
  std::vector<ordered_json> out;
  for (auto& [k, v] : by_query) out.push_back(std::move(v));
  return out;
}

void write_pages(const fs::path& dir, const std::vector<Topic>& topics) {
  fs::create_directories(dir / "pages");
  std::vector<ordered_json> manifest;
  for (const auto& t : topics) {
    for (const auto& p : t.pages) {
      auto rel = "pages/" + p.slug + ".html";
      std::ofstream(dir / rel, std::ios::binary | std::ios::trunc) << page_html(p, t.name);
      ordered_json m;
      m["url"] = p.url;
      m["path"] = rel;
      manifest.push_back(std::move(m));
    }
  }
  write_json_lines(dir / "pages.jsonl", manifest);
}

std::shared_ptr<llm::RecordingBackend> recorder_over(const Registry& reg) {
  return std::make_shared<llm::RecordingBackend>(std::make_shared<StandInModel>(reg));
}

// ---- fixture sets ----------------------------------------------------------

void gen_tau_sweep(const fs::path& root, const std::vector<Topic>& topics) {
  auto dir = root / "tau_sweep";
  fs::create_directories(dir);
  Registry reg;
  std::vector<QuestionSpec> main_qs, prior_qs;
  std::map<std::string, std::size_t> topic_of;
  Rng rng(0x7a0);
  for (std::size_t t = 0; t < topics.size(); ++t) {
    for (std::size_t a = 0; a < kAttrs.size(); ++a) {
      char id[32];
      std::snprintf(id, sizeof(id), "tq-%03zu", t * kAttrs.size() + a + 1);
      const auto& other = topics[(t + 1 + rng.pick(topics.size() - 1)) % topics.size()];
      auto q = main_question(topics[t], a, id, other.facts[a].value);
      topic_of[q.id] = t;
      main_qs.push_back(q);
    }
    for (std::size_t a = 0; a < 5; ++a) {
      char id[32];
      std::snprintf(id, sizeof(id), "prior-%03zu", t * 5 + a + 1);
      auto q = prior_question(topics[t], a, id);
      topic_of[q.id] = t;
      prior_qs.push_back(q);
    }
  }
  for (const auto& q : main_qs) reg.add(q);
  for (const auto& q : prior_qs) reg.add(q);
  reg.freeze();

  write_pages(dir, topics);
  auto all = main_qs;
  all.insert(all.end(), prior_qs.begin(), prior_qs.end());
  write_json_lines(dir / "corpus.jsonl", corpus_for(topics, all, topic_of, 5));
  eval::write_dataset(dir / "dataset.jsonl", to_items(main_qs));
  eval::write_dataset(dir / "prior_dataset.jsonl", to_items(prior_qs));

  ordered_json cfg;
  cfg["dataset"] = "dataset.jsonl";
  cfg["dataset_tag"] = "fixture-popular";
  cfg["mode"] = "memory_augmented";
  cfg["reservoir"] = "seed_reservoir.jsonl";
  cfg["workers"] = 4;
  cfg["timing"] = "simulated";
  cfg["gateway"] = {{"backend", "scripted_mock"}, {"script", "mock_script.jsonl"}, {"simulated_latency_ms", 900}};
  cfg["search"] = {{"backend", "fixture"}, {"corpus", "corpus.jsonl"}, {"simulated_latency_ms", 300}};
  cfg["pages"] = {{"backend", "fixture"}, {"manifest", "pages.jsonl"}, {"simulated_latency_ms", 450}};
  cfg["embedding"] = {{"backend", "hashing"}, {"dimension", 256}};
  cfg["retrieval"] = {{"top_n", 5}, {"order", "mixed"}, {"cap", 30}, {"bm25", {{"passages_kept", 1}}}};
  cfg["trigger"] = {{"tau", 0.6}, {"theta", 3}, {"max_memory_instances_per_query", 10}};
  cfg["filter"] = {{"strength", "strong"}};
  write_json(dir / "config.json", cfg);

  auto run_cfg = config::RunConfig::load(dir / "config.json");

  // Seed: a cold-start memory run over the prior questions.
  {
    config::BuildOptions opts;
    opts.with_memory = true;
    opts.chat_override = std::make_shared<StandInModel>(reg);
    auto st = config::build_stack(run_cfg, opts);
    pipeline::Pipeline pipe(st.services(), run_cfg.pipeline);
    pipe.run_batch(pipeline::to_questions(to_items(prior_qs), ""),
                   pipeline::RunPlan::for_mode(PipelineMode::memory_augmented));
    st.reservoir->compact();
    st.reservoir->persist(dir / "seed_reservoir.jsonl");
    std::cout << "tau_sweep: seed reservoir has " << st.reservoir->size() << " entries\n";
  }

  // Record the sweep the acceptance suite replays, plus the default-tau run.
  std::shared_ptr<llm::RecordingBackend> rec;
  config::BuildOptions opts;
  opts.with_memory = true;
  opts.reservoir_path = dir / "seed_reservoir.jsonl";
  opts.chat_override = std::make_shared<StandInModel>(reg);
  opts.chat_hook = [&](std::shared_ptr<llm::ChatBackend> inner) {
    rec = std::make_shared<llm::RecordingBackend>(inner);
    return rec;
  };
  auto st = config::build_stack(run_cfg, opts);
  auto rows = pipeline::sweep_tau(st.services(), run_cfg.pipeline, *st.reservoir, to_items(main_qs),
                                  {0.2, 0.4, 0.6, 0.8, 1.0}, 3);
  rec->write(dir / "mock_script.jsonl");
  std::cout << "tau_sweep: " << rec->entries().size() << " prompts\n" << pipeline::sweep_csv(rows);
}

void gen_golden(const fs::path& root, const std::vector<Topic>& topics) {
  auto dir = root / "golden";
  fs::create_directories(dir);
  Registry reg;
  std::vector<QuestionSpec> qs = {main_question(topics[2], 0, "gq-1", topics[3].facts[0].value),
                                  main_question(topics[4], 7, "gq-2", topics[5].facts[7].value)};
  for (const auto& q : qs) reg.add(q);
  reg.freeze();

  // Four distinct snippets per question: two for the first query, one each
  // for the others.
  std::vector<ordered_json> corpus;
  const std::vector<std::size_t> topic_idx = {2, 4};
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& t = topics[topic_idx[i]];
    const std::vector<std::vector<std::size_t>> pages = {{0, 1}, {2}, {3}};
    for (std::size_t k = 0; k < qs[i].queries.size(); ++k) {
      ordered_json rec;
      rec["query"] = qs[i].queries[k];
      rec["results"] = ordered_json::array();
      for (auto p : pages[k]) rec["results"].push_back(hit_json(t.pages[p].title, t.pages[p].snippet, t.pages[p].url));
      corpus.push_back(std::move(rec));
    }
  }
  write_json_lines(dir / "corpus.jsonl", corpus);
  eval::write_dataset(dir / "dataset.jsonl", to_items(qs));

  ordered_json cfg;
  cfg["dataset"] = "dataset.jsonl";
  cfg["dataset_tag"] = "fixture-golden";
  cfg["mode"] = "rplus_rfr";
  cfg["workers"] = 1;
  cfg["timing"] = "simulated";
  cfg["gateway"] = {{"backend", "scripted_mock"}, {"script", "mock_script.jsonl"}};
  cfg["search"] = {{"backend", "fixture"}, {"corpus", "corpus.jsonl"}, {"simulated_latency_ms", 120}};
  cfg["retrieval"] = {{"top_n", 10}, {"order", "mixed"}, {"cap", 30}};
  write_json(dir / "config.json", cfg);

  auto run_cfg = config::RunConfig::load(dir / "config.json");
  auto rec = recorder_over(reg);
  config::BuildOptions opts;
  opts.chat_override = rec;
  auto st = config::build_stack(run_cfg, opts);
  pipeline::Pipeline pipe(st.services(), run_cfg.pipeline);
  pipe.run_batch(pipeline::to_questions(to_items(qs), ""), pipeline::RunPlan::for_mode(PipelineMode::rplus_rfr));
  rec->write(dir / "mock_script.jsonl");

  // Freeze the replayed output.
  config::BuildOptions replay;
  auto st2 = config::build_stack(config::RunConfig::load(dir / "config.json"), replay);
  pipeline::Pipeline pipe2(st2.services(), run_cfg.pipeline);
  auto batch = pipe2.run_batch(pipeline::to_questions(to_items(qs), "fixture-golden"),
                               pipeline::RunPlan::for_mode(PipelineMode::rplus_rfr));
  write_records(dir / "expected_records.jsonl", batch.records);
  std::cout << "golden: " << rec->entries().size() << " prompts\n";
}

void gen_plateau(const fs::path& root) {
  auto dir = root / "plateau";
  fs::create_directories(dir);
  Rng rng(0x91a7);
  Registry reg;
  std::vector<QuestionSpec> qs;
  std::vector<ordered_json> corpus;
  std::set<std::string> names;
  auto fresh_name = [&] {
    for (;;) {
      auto n = person(rng);
      if (names.insert(n).second) return n;
    }
  };
  static const std::vector<std::string> roles = {"head librarian", "harbor master", "chief astronomer",
                                                 "abbey organist", "canal keeper"};
  for (int i = 0; i < 12; ++i) {
    auto place = word(rng, 3);
    const auto& role = roles[static_cast<std::size_t>(i) % roles.size()];
    QuestionSpec q;
    char id[32];
    std::snprintf(id, sizeof(id), "pq-%02d", i + 1);
    q.id = id;
    q.original = "who were the " + role + "s of " + place + "?";
    q.rewritten = "Which people have served as " + role + " of " + place + "?";
    q.queries = {place + " " + role, place + " " + role + " history", "former " + role + " " + place};
    q.answers = {fresh_name(), fresh_name(), fresh_name()};
    q.wrong = fresh_name();
    // Answer j only appears in query j's results: the first at rank 1, the
    // second within the top five, the third anywhere in the top ten.
    const std::vector<int> ranks = {1, rng.range(1, 5), rng.range(1, 10)};
    for (std::size_t k = 0; k < 3; ++k) {
      ordered_json rec;
      rec["query"] = q.queries[k];
      rec["results"] = ordered_json::array();
      for (int r = 1; r <= 10; ++r) {
        std::string title = place + " records " + std::to_string(k + 1) + "." + std::to_string(r);
        std::string snippet;
        if (r == ranks[k] || (k == 2 && r > ranks[k] && rng.pick(4) == 0)) {
          snippet = q.answers[k] + " served as " + role + " of " + place + " for several years.";
        } else {
          snippet = "A note on " + place + " and town council meeting " + std::to_string(k * 10 + r) + ".";
        }
        rec["results"].push_back(hit_json(title, snippet,
                                          "https://search.fixture.test/" + slugify(title)));
      }
      corpus.push_back(std::move(rec));
    }
    qs.push_back(std::move(q));
  }
  for (const auto& q : qs) reg.add(q);
  reg.freeze();
  write_json_lines(dir / "corpus.jsonl", corpus);
  eval::write_dataset(dir / "dataset.jsonl", to_items(qs));

  ordered_json cfg;
  cfg["dataset"] = "dataset.jsonl";
  cfg["dataset_tag"] = "fixture-plateau";
  cfg["gateway"] = {{"backend", "scripted_mock"}, {"script", "mock_script.jsonl"}};
  cfg["search"] = {{"backend", "fixture"}, {"corpus", "corpus.jsonl"}};
  cfg["retrieval"] = {{"top_n", 10}};
  write_json(dir / "config.json", cfg);

  auto run_cfg = config::RunConfig::load(dir / "config.json");
  auto rec = recorder_over(reg);
  config::BuildOptions opts;
  opts.chat_override = rec;
  auto st = config::build_stack(run_cfg, opts);
  pipeline::Pipeline pipe(st.services(), run_cfg.pipeline);
  std::vector<std::size_t> counts;
  for (std::size_t c = 1; c <= 30; ++c) counts.push_back(c);
  auto rows = pipe.plateau_study(to_items(qs), counts,
                                 {retrieval::ArrangementOrder::sequential, retrieval::ArrangementOrder::mixed});
  rec->write(dir / "mock_script.jsonl");
  std::cout << "plateau: " << rec->entries().size() << " prompts\n";
}

void gen_ablation(const fs::path& root, const std::vector<Topic>& topics) {
  auto dir = root / "ablation";
  fs::create_directories(dir);
  Registry reg;
  std::vector<QuestionSpec> qs;
  std::map<std::string, std::size_t> topic_of;
  for (std::size_t t = 10; t < 16; ++t) {
    for (std::size_t a : {1UL, 6UL}) {
      char id[32];
      std::snprintf(id, sizeof(id), "aq-%02zu", qs.size() + 1);
      auto q = main_question(topics[t], a, id, topics[t - 10].facts[a].value);
      topic_of[q.id] = t;
      qs.push_back(q);
    }
  }
  for (const auto& q : qs) reg.add(q);
  reg.freeze();
  write_json_lines(dir / "corpus.jsonl", corpus_for(topics, qs, topic_of, 5));
  eval::write_dataset(dir / "dataset.jsonl", to_items(qs));
  eval::write_dataset(dir / "dataset_small.jsonl", to_items({qs.begin(), qs.begin() + 3}));

  ordered_json cfg;
  cfg["dataset"] = "dataset.jsonl";
  cfg["dataset_tag"] = "fixture-ablation";
  cfg["workers"] = 2;
  cfg["timing"] = "simulated";
  cfg["gateway"] = {{"backend", "scripted_mock"}, {"script", "mock_script.jsonl"}};
  cfg["search"] = {{"backend", "fixture"}, {"corpus", "corpus.jsonl"}, {"simulated_latency_ms", 200}};
  cfg["retrieval"] = {{"top_n", 5}, {"order", "mixed"}, {"cap", 30}};
  cfg["settings"] = ordered_json::array();
  for (const char* q : {"original", "rewritten"}) {
    for (const char* k : {"none", "all", "filtered"}) cfg["settings"].push_back({{"question", q}, {"knowledge", k}});
  }
  write_json(dir / "config.json", cfg);

  auto run_cfg = config::RunConfig::load(dir / "config.json");
  auto rec = recorder_over(reg);
  config::BuildOptions opts;
  opts.chat_override = rec;
  auto st = config::build_stack(run_cfg, opts);
  pipeline::Pipeline pipe(st.services(), run_cfg.pipeline);
  auto questions = pipeline::to_questions(to_items(qs), "");
  auto plans = run_cfg.settings;
  // The five named modes reuse the same script.
  for (auto m : {PipelineMode::direct, PipelineMode::rrr, PipelineMode::rplus_rr, PipelineMode::rplus_rfr}) {
    plans.push_back(pipeline::RunPlan::for_mode(m));
  }
  for (const auto& plan : plans) pipe.run_batch(questions, plan);
  rec->write(dir / "mock_script.jsonl");
  std::cout << "ablation: " << rec->entries().size() << " prompts\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_fixtures <fixtures-dir>\n";
    return 1;
  }
  spdlog::set_level(spdlog::level::warn);
  fs::path root = argv[1];
  fs::create_directories(root);
  auto topics = make_topics(20, 0x5eedf1c7);
  gen_golden(root, topics);
  gen_plateau(root);
  gen_ablation(root, topics);
  gen_tau_sweep(root, topics);
  return 0;
}
