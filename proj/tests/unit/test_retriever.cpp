// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "ragkit/errors.hpp"
#include "ragkit/retriever.hpp"
#include "ragkit/text.hpp"
#include "test_support.hpp"

namespace ragkit::retrieval {
namespace {

using ragkit::testing::fixtures_dir;
using ragkit::testing::read_file;
using ragkit::testing::TempDir;
using ragkit::testing::write_file;

std::vector<SearchHit> numbered_hits(const std::string& prefix, int n) {
  std::vector<SearchHit> hits;
  for (int i = 1; i <= n; ++i) {
    hits.push_back({prefix + " title " + std::to_string(i), prefix + " snippet " + std::to_string(i),
                    "https://example.org/" + prefix + "/" + std::to_string(i)});
  }
  return hits;
}

TEST(FixtureSearch, FewerHitsThanRequested) {
  FixtureSearchBackend backend({{"q1", numbered_hits("q1", 7)}});
  auto g = search(backend, "q1", 10);
  ASSERT_EQ(g.instances.size(), 7u);
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(g.instances[i].source.rank, i + 1);
    EXPECT_EQ(g.instances[i].source.kind, SourceKind::external);
  }
}

TEST(FixtureSearch, TruncatesInCorpusOrder) {
  FixtureSearchBackend backend({{"q1", numbered_hits("q1", 7)}});
  auto g = search(backend, "q1", 5, 2);
  ASSERT_EQ(g.instances.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(g.instances[i].title, "q1 title " + std::to_string(i + 1));
  EXPECT_EQ(g.query_index, 2);
  EXPECT_EQ(g.instances[0].source.query_index, 2);
}

TEST(FixtureSearch, AbsentQueryGivesEmptyGroup) {
  FixtureSearchBackend backend({{"q1", numbered_hits("q1", 7)}}, 42);
  auto g = search(backend, "absent", 10);
  EXPECT_TRUE(g.instances.empty());
  EXPECT_EQ(g.latency_ms, 42u);
  EXPECT_THROW(search(backend, "q1", 0), std::invalid_argument);
}

TEST(FixtureSearch, LoadsCorpusFileAndRejectsBlankHits) {
  TempDir dir;
  write_file(dir / "c.jsonl",
             R"({"query":"q","results":[{"title":"T1","snippet":"S1","url":"u1"},{"title":"T3","snippet":"S3","url":"u3"}]})"
             "\n\n");
  FixtureSearchBackend backend(dir / "c.jsonl");
  EXPECT_EQ(backend.size(), 1u);
  auto g = search(backend, "q", 10);
  ASSERT_EQ(g.instances.size(), 2u);
  EXPECT_EQ(g.instances[1].title, "T3");
  EXPECT_EQ(g.instances[1].source.rank, 2);

  write_file(dir / "blank.jsonl",
             R"({"query":"q","results":[{"title":" ","snippet":"S2","url":"u2"}]})"
             "\n");
  EXPECT_THROW(FixtureSearchBackend(dir / "blank.jsonl"), FormatError);
  write_file(dir / "bad.jsonl", "{\"query\":\"q\"}\n");
  EXPECT_THROW(FixtureSearchBackend(dir / "bad.jsonl"), FormatError);
}

TEST(SearchPayload, BingAndFlatShapes) {
  auto bing = parse_search_payload(
      R"({"webPages":{"value":[{"name":"N1","snippet":"S1","url":"U1"},{"name":"N2","snippet":"S2","url":"U2"}]}})");
  ASSERT_EQ(bing.size(), 2u);
  EXPECT_EQ(bing[0].title, "N1");
  EXPECT_EQ(bing[1].url, "U2");
  auto flat = parse_search_payload(R"({"results":[{"title":"T","snippet":"S","url":"U"}]})");
  ASSERT_EQ(flat.size(), 1u);
  EXPECT_EQ(flat[0].snippet, "S");
  EXPECT_TRUE(parse_search_payload(R"({"webPages":{"value":[]}})").empty());
}

TEST(RemoteSearch, MissingKeyIsAuthError) {
  ::unsetenv("RAGKIT_TEST_NO_SEARCH_KEY");
  RemoteSearchConfig cfg;
  cfg.endpoint_url = "http://127.0.0.1:9/search";
  cfg.api_key_env_var = "RAGKIT_TEST_NO_SEARCH_KEY";
  EXPECT_THROW(RemoteSearchBackend{cfg}, AuthError);
}

// ---- BM25 -----------------------------------------------------------------

std::vector<std::string> oracle_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + " ") {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  return out;
}

// Direct transcription of the Okapi formula over the whole corpus.
double oracle_bm25(const std::vector<std::string>& query, std::size_t doc,
                   const std::vector<std::vector<std::string>>& corpus, double k1, double b) {
  double n = static_cast<double>(corpus.size());
  double total = 0;
  for (const auto& d : corpus) total += static_cast<double>(d.size());
  double avg = total / n;
  double score = 0;
  for (const auto& term : query) {
    double df = 0;
    for (const auto& d : corpus) df += std::count(d.begin(), d.end(), term) > 0 ? 1 : 0;
    double tf = static_cast<double>(std::count(corpus[doc].begin(), corpus[doc].end(), term));
    if (tf == 0) continue;
    double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    double len = static_cast<double>(corpus[doc].size());
    score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg));
  }
  return score;
}

TEST(Bm25, SinglePassageValue) {
  std::vector<std::vector<std::string>> corpus{{"alpha", "beta"}};
  auto stats = CorpusStats::build(corpus);
  EXPECT_EQ(stats.passage_count, 1u);
  // N = 1, df = 1: ln((1 - 1 + 0.5) / (1 + 0.5) + 1) = ln(4/3).
  double idf = std::log(0.5 / 1.5 + 1.0);
  EXPECT_NEAR(idf, 0.2877, 5e-5);
  EXPECT_NEAR(bm25_score({"alpha"}, corpus[0], stats), idf, 1e-12);
}

TEST(Bm25, AbsentTermsContributeNothing) {
  std::vector<std::vector<std::string>> corpus{{"alpha", "beta"}, {"gamma"}};
  auto stats = CorpusStats::build(corpus);
  EXPECT_EQ(bm25_score({"zeta"}, corpus[0], stats), 0.0);
  EXPECT_EQ(bm25_score({"zeta", "eta"}, corpus[1], stats), 0.0);
  EXPECT_EQ(bm25_score({"alpha", "zeta"}, corpus[0], stats), bm25_score({"alpha"}, corpus[0], stats));
}

TEST(Bm25, ToyCorpusMatchesOracle) {
  auto doc = nlohmann::json::parse(read_file(fixtures_dir() / "bm25" / "toy_corpus.json"));
  std::vector<std::vector<std::string>> corpus;
  for (const auto& p : doc["passages"]) corpus.push_back(text::word_tokens(p.get<std::string>()));
  auto stats = CorpusStats::build(corpus);
  for (const auto& params : {Bm25Params{}, Bm25Params{1.2, 0.5, 3, 5}, Bm25Params{2.0, 1.0, 3, 5}}) {
    for (const auto& q : doc["queries"]) {
      auto qs = q.get<std::string>();
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        std::vector<std::vector<std::string>> oracle_corpus;
        for (const auto& p : doc["passages"]) oracle_corpus.push_back(oracle_tokens(p.get<std::string>()));
        double expected = oracle_bm25(oracle_tokens(qs), i, oracle_corpus, params.k1, params.b);
        EXPECT_NEAR(bm25_score(text::word_tokens(qs), corpus[i], stats, params), expected, 1e-9)
            << "query '" << qs << "' passage " << i;
      }
    }
  }
}

TEST(Bm25, ParamsValidate) {
  EXPECT_THROW((Bm25Params{0.0, 0.75, 3, 5}.validate()), std::invalid_argument);
  EXPECT_THROW((Bm25Params{1.5, 1.5, 3, 5}.validate()), std::invalid_argument);
  EXPECT_THROW((Bm25Params{1.5, 0.75, 0, 5}.validate()), std::invalid_argument);
  EXPECT_THROW((Bm25Params{1.5, 0.75, 3, 0}.validate()), std::invalid_argument);
}

// ---- pages ----------------------------------------------------------------

TEST(Html, StripsMarkupAndReadsTitle) {
  auto html = read_file(fixtures_dir() / "bm25" / "page_10_sentences.html");
  EXPECT_EQ(html_title(html), "Northern Valley Notes");
  auto plain = html_to_text(html);
  EXPECT_EQ(plain.find("tracking"), std::string::npos);
  EXPECT_EQ(plain.find("margin"), std::string::npos);
  EXPECT_EQ(plain.find('<'), std::string::npos);
  EXPECT_EQ(html_to_text("<p>a &amp; b &lt;c&gt;</p>"), "a & b <c>");
}

TEST(Distill, TenSentencePageSelectsQuerySentences) {
  auto plain = html_to_text(read_file(fixtures_dir() / "bm25" / "page_10_sentences.html"));
  auto sentences = split_sentences(plain);
  ASSERT_EQ(sentences.size(), 10u);
  Bm25Params params;
  params.passage_window_sentences = 1;
  params.passages_kept = 2;
  auto out = distill_text(plain, "glacier meltwater", params);
  EXPECT_EQ(out, sentences[2] + " " + sentences[6]);
}

TEST(Distill, KeepingEverythingReturnsWholePage) {
  std::string plain = "One fact. Two facts. Three facts.";
  Bm25Params params;
  params.passage_window_sentences = 1;
  params.passages_kept = 3;
  EXPECT_EQ(distill_text(plain, "zzz", params), "One fact. Two facts. Three facts.");
  params.passages_kept = 10;
  EXPECT_EQ(distill_text(plain, "facts", params), "One fact. Two facts. Three facts.");
}

TEST(Distill, EmptyPageThrows) {
  EXPECT_THROW(distill_text("", "q", {}), EmptyPage);
  EXPECT_THROW(distill_text(html_to_text("<html><script>x()</script></html>"), "q", {}), EmptyPage);
}

TEST(Distill, SentenceSplitting) {
  auto s = split_sentences("Smith arrived. Did he?\" Yes!!\nNo terminator here");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[1], "Did he?\"");
  EXPECT_EQ(s[2], "Yes!!");
  EXPECT_EQ(s[3], "No terminator here");
}

TEST(FixturePages, FetchAndDistill) {
  TempDir dir;
  write_file(dir / "p.html", "<html><body><p>Apples are red. Bananas are yellow. Cherries are red too.</p></body></html>");
  write_file(dir / "m.jsonl", R"({"url":"https://x/p","path":"p.html"})"
                              "\n");
  FixturePageSource pages(dir / "m.jsonl", 7);
  EXPECT_EQ(pages.fetch("https://x/p").latency_ms, 7u);
  Bm25Params params;
  params.passage_window_sentences = 1;
  params.passages_kept = 1;
  EXPECT_EQ(fetch_and_distill(pages, "https://x/p", "bananas", params), "Bananas are yellow.");
  EXPECT_THROW(pages.fetch("https://x/missing"), FetchError);
}

// ---- arrangement ----------------------------------------------------------

SearchResultGroup group(const std::string& name, int index, int n) {
  SearchResultGroup g;
  g.query = name;
  g.query_index = index;
  for (int r = 1; r <= n; ++r) {
    g.instances.push_back(ragkit::testing::ki(name + std::to_string(r), "content of " + name + std::to_string(r), index, r));
  }
  return g;
}

std::vector<std::string> titles(const std::vector<KnowledgeInstance>& ks) {
  std::vector<std::string> out;
  for (const auto& k : ks) out.push_back(k.title);
  return out;
}

TEST(Arrange, MixedRoundRobin) {
  std::vector<SearchResultGroup> gs{group("a", 0, 2), group("b", 1, 2)};
  EXPECT_EQ(titles(arrange(gs, ArrangementOrder::mixed, 4)), (std::vector<std::string>{"a1", "b1", "a2", "b2"}));
}

TEST(Arrange, SequentialConcatenation) {
  std::vector<SearchResultGroup> gs{group("a", 0, 2), group("b", 1, 2)};
  EXPECT_EQ(titles(arrange(gs, ArrangementOrder::sequential, 3)), (std::vector<std::string>{"a1", "a2", "b1"}));
}

TEST(Arrange, ThreeGroupsOfTenCapNine) {
  std::vector<SearchResultGroup> gs{group("a", 0, 10), group("b", 1, 10), group("c", 2, 10)};
  auto out = arrange(gs, ArrangementOrder::mixed, 9);
  ASSERT_EQ(out.size(), 9u);
  std::map<int, int> per;
  for (const auto& k : out) ++per[k.source.query_index];
  EXPECT_EQ(per[0], 3);
  EXPECT_EQ(per[1], 3);
  EXPECT_EQ(per[2], 3);
}

TEST(Arrange, GroupsOrderedByQueryIndexAndUnevenGroups) {
  std::vector<SearchResultGroup> gs{group("b", 1, 1), group("a", 0, 3)};
  EXPECT_EQ(titles(arrange(gs, ArrangementOrder::mixed, 30)), (std::vector<std::string>{"a1", "b1", "a2", "a3"}));
  EXPECT_EQ(titles(arrange(gs, ArrangementOrder::sequential, 30)), (std::vector<std::string>{"a1", "a2", "a3", "b1"}));
}

TEST(Arrange, DropsRepeatedInstances) {
  auto a = group("a", 0, 2);
  auto b = group("b", 1, 2);
  b.instances[0] = ragkit::testing::ki("a1", "content of a1", 1, 1);
  auto out = arrange({a, b}, ArrangementOrder::mixed, 30);
  EXPECT_EQ(titles(out), (std::vector<std::string>{"a1", "a2", "b2"}));
}

TEST(Arrange, Properties) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    int ng = 1 + static_cast<int>(rng() % 5);
    std::vector<SearchResultGroup> gs;
    std::size_t total = 0;
    for (int g = 0; g < ng; ++g) {
      int n = static_cast<int>(rng() % 12);
      gs.push_back(group(std::string(1, static_cast<char>('a' + g)), g, n));
      total += static_cast<std::size_t>(n);
    }
    std::shuffle(gs.begin(), gs.end(), rng);
    auto cap = static_cast<std::size_t>(rng() % 40);
    auto mixed = arrange(gs, ArrangementOrder::mixed, cap);
    auto seq = arrange(gs, ArrangementOrder::sequential, cap);
    EXPECT_EQ(mixed.size(), std::min(cap, total));
    EXPECT_EQ(seq.size(), std::min(cap, total));
    if (cap >= total) {
      auto tm = titles(mixed), ts = titles(seq);
      std::sort(tm.begin(), tm.end());
      std::sort(ts.begin(), ts.end());
      EXPECT_EQ(tm, ts);
    }
  }
}

TEST(Arrange, ParseOrder) {
  EXPECT_EQ(parse_arrangement("mixed"), ArrangementOrder::mixed);
  EXPECT_EQ(parse_arrangement("sequential"), ArrangementOrder::sequential);
  EXPECT_THROW(parse_arrangement("random"), std::invalid_argument);
}

}  // namespace
}  // namespace ragkit::retrieval
