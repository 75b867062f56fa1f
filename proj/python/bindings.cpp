// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "ragkit/cli.hpp"
#include "ragkit/embedding.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/eval.hpp"
#include "ragkit/reservoir.hpp"
#include "ragkit/retriever.hpp"
#include "ragkit/rewriter.hpp"
#include "ragkit/text.hpp"

namespace py = pybind11;
using namespace ragkit;

namespace {

using TitleContent = std::pair<std::string, std::string>;

std::vector<KnowledgeInstance> to_instances(const std::vector<TitleContent>& items) {
  std::vector<KnowledgeInstance> out;
  out.reserve(items.size());
  for (const auto& [title, content] : items) out.push_back(KnowledgeInstance::make(title, content, {}));
  return out;
}

std::vector<double> bm25_scores(const std::string& query, const std::vector<std::string>& passages, double k1,
                                double b) {
  std::vector<std::vector<std::string>> tokens;
  for (const auto& p : passages) tokens.push_back(text::word_tokens(p));
  auto stats = retrieval::CorpusStats::build(tokens);
  retrieval::Bm25Params params;
  params.k1 = k1;
  params.b = b;
  params.validate();
  auto q = text::word_tokens(query);
  std::vector<double> out;
  for (const auto& t : tokens) out.push_back(retrieval::bm25_score(q, t, stats, params));
  return out;
}

std::string distill(const std::string& plain_text, const std::string& query, int window, int kept) {
  retrieval::Bm25Params params;
  params.passage_window_sentences = window;
  params.passages_kept = kept;
  params.validate();
  return retrieval::distill_text(plain_text, query, params);
}

// Groups are lists of (title, content); the group position is its query index.
std::vector<std::tuple<std::string, std::string, int, int>> arrange(const std::vector<std::vector<TitleContent>>& groups,
                                                                    const std::string& order, std::size_t cap) {
  std::vector<retrieval::SearchResultGroup> gs;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    retrieval::SearchResultGroup group;
    group.query_index = static_cast<int>(g);
    for (std::size_t r = 0; r < groups[g].size(); ++r) {
      KnowledgeSource src{SourceKind::external, static_cast<int>(g), static_cast<int>(r + 1), ""};
      group.instances.push_back(KnowledgeInstance::make(groups[g][r].first, groups[g][r].second, src));
    }
    gs.push_back(std::move(group));
  }
  std::vector<std::tuple<std::string, std::string, int, int>> out;
  for (const auto& k : retrieval::arrange(gs, retrieval::parse_arrangement(order), cap)) {
    out.emplace_back(k.title, k.content, k.source.query_index, k.source.rank);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_ragkit, m) {
  m.doc() = "Retrieval-augmented QA toolkit core";

  auto base = py::register_exception<RagError>(m, "RagError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<AuthError>(m, "AuthError", base);
  py::register_exception<EmptyTextError>(m, "EmptyTextError", base);
  py::register_exception<EmptyField>(m, "EmptyField", base);
  py::register_exception<EmptyPage>(m, "EmptyPage", base);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base);

  m.def("normalize", &eval::normalize, py::arg("text"));
  m.def("hit", &eval::hit, py::arg("response"), py::arg("answers"));
  m.def("exact_match", &eval::exact_match, py::arg("response"), py::arg("answers"));
  m.def("token_f1", &eval::token_f1, py::arg("response"), py::arg("answers"));
  m.def(
      "answer_recall",
      [](const std::vector<TitleContent>& k, const std::vector<std::string>& a) { return eval::answer_recall(to_instances(k), a); },
      py::arg("knowledge"), py::arg("answers"));
  m.def(
      "snippet_precision",
      [](const std::vector<TitleContent>& k, const std::vector<std::string>& a) {
        return eval::snippet_precision(to_instances(k), a);
      },
      py::arg("knowledge"), py::arg("answers"));

  m.def(
      "parse_rewrite_output",
      [](const std::string& raw, int max_queries) -> py::object {
        auto r = rewriter::parse_rewrite_output(raw, max_queries);
        if (!r) return py::none();
        return py::make_tuple(r->rewritten_question, r->queries);
      },
      py::arg("raw"), py::arg("max_queries") = 5);

  m.def("bm25_scores", &bm25_scores, py::arg("query"), py::arg("passages"), py::arg("k1") = 1.5, py::arg("b") = 0.75);
  m.def("html_to_text", [](const std::string& html) { return retrieval::html_to_text(html); }, py::arg("html"));
  m.def("split_sentences", [](const std::string& t) { return retrieval::split_sentences(t); }, py::arg("text"));
  m.def("distill", &distill, py::arg("plain_text"), py::arg("query"), py::arg("window") = 3, py::arg("kept") = 5);
  m.def("arrange", &arrange, py::arg("groups"), py::arg("order"), py::arg("cap"));

  m.def("prompt_fingerprint", [](const std::string& p) { return text::prompt_fingerprint(p); }, py::arg("prompt"));

  py::class_<embedding::EmbeddingVector>(m, "EmbeddingVector")
      .def_property_readonly("values", &embedding::EmbeddingVector::values)
      .def("__len__", &embedding::EmbeddingVector::dimension)
      .def("__eq__", [](const embedding::EmbeddingVector& a, const embedding::EmbeddingVector& b) { return a == b; });
  m.def("cosine", &embedding::cosine, py::arg("a"), py::arg("b"));

  py::class_<embedding::Embedder, std::shared_ptr<embedding::Embedder>>(m, "Embedder")
      .def("embed", [](const embedding::Embedder& e, const std::string& t) { return e.embed(t); }, py::arg("text"))
      .def_property_readonly("dimension", &embedding::Embedder::dimension);
  py::class_<embedding::HashingEmbedder, embedding::Embedder, std::shared_ptr<embedding::HashingEmbedder>>(
      m, "HashingEmbedder")
      .def(py::init<std::size_t, std::uint64_t>(), py::arg("dimension") = 256,
           py::arg("seed") = embedding::HashingEmbedder::kDefaultSeed);

  py::class_<memory::MemoryReservoir>(m, "MemoryReservoir")
      .def(py::init([](std::shared_ptr<embedding::Embedder> e) { return std::make_unique<memory::MemoryReservoir>(e); }),
           py::arg("embedder"))
      .def(
          "upsert",
          [](memory::MemoryReservoir& r, const std::string& t, const std::string& c) {
            return r.upsert(t, c) == memory::UpsertOutcome::inserted ? "inserted" : "replaced";
          },
          py::arg("title"), py::arg("content"))
      .def(
          "popularity",
          [](const memory::MemoryReservoir& r, const std::string& q, double tau, int theta) {
            memory::TriggerConfig cfg;
            cfg.tau = tau;
            cfg.theta = theta;
            cfg.validate();
            auto rep = r.popularity(q, cfg);
            std::vector<std::pair<std::string, double>> matches;
            for (const auto& t : rep.matched_titles) matches.emplace_back(t.title, t.similarity);
            return py::make_tuple(rep.pop, rep.within_boundary, matches);
          },
          py::arg("query"), py::arg("tau") = 0.6, py::arg("theta") = 3)
      .def(
          "recall",
          [](const memory::MemoryReservoir& r, const std::string& q, double tau, int theta, int cap) {
            memory::TriggerConfig cfg{tau, theta, cap};
            cfg.validate();
            std::vector<TitleContent> out;
            for (const auto& k : r.recall_knowledge(q, cfg)) out.emplace_back(k.title, k.content);
            return out;
          },
          py::arg("query"), py::arg("tau") = 0.6, py::arg("theta") = 3, py::arg("max_instances") = 10)
      .def("entries",
           [](const memory::MemoryReservoir& r) {
             std::vector<std::tuple<std::string, std::string, std::uint64_t>> out;
             for (const auto& e : r.entries()) out.emplace_back(e.title, e.content, e.inserted_at);
             return out;
           })
      .def("persist", &memory::MemoryReservoir::persist, py::arg("path"))
      .def("load", &memory::MemoryReservoir::load, py::arg("path"))
      .def("compact", &memory::MemoryReservoir::compact)
      .def("__len__", &memory::MemoryReservoir::size);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "ragkit");
        py::gil_scoped_release release;
        return cli::run_app(args);
      },
      py::arg("args"));
}
