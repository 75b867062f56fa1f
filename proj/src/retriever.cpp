// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "http_client.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit::retrieval {

using nlohmann::json;

// ---- search ---------------------------------------------------------------

namespace {

SearchHit hit_from_json(const json& r, std::size_t lineno) {
  if (!r.is_object()) throw FormatError("corpus: result must be an object", lineno);
  auto field = [&](const char* name) -> std::string {
    if (!r.contains(name)) return {};
    if (!r[name].is_string()) throw FormatError(std::string("corpus: field '") + name + "' must be a string", lineno);
    return r[name].get<std::string>();
  };
  SearchHit h{field("title"), field("snippet"), field("url")};
  if (text::trim(h.title).empty() || text::trim(h.snippet).empty()) {
    throw FormatError("corpus: result needs a non-empty title and snippet", lineno);
  }
  return h;
}

}  // namespace

FixtureSearchBackend::FixtureSearchBackend(const std::filesystem::path& corpus,
                                           std::uint64_t simulated_latency_ms)
    : latency_ms_(simulated_latency_ms) {
  std::ifstream in(corpus);
  if (!in) throw IoError("cannot open search corpus " + corpus.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("corpus: invalid JSON: ") + e.what(), lineno);
    }
    if (!rec.is_object() || !rec.contains("query") || !rec["query"].is_string() ||
        !rec.contains("results") || !rec["results"].is_array()) {
      throw FormatError("corpus: record needs 'query' string and 'results' array", lineno);
    }
    std::vector<SearchHit> hits;
    for (const auto& r : rec["results"]) hits.push_back(hit_from_json(r, lineno));
    auto q = rec["query"].get<std::string>();
    if (corpus_.count(q)) spdlog::warn("corpus {}:{}: duplicate query '{}', later record wins", corpus.string(), lineno, q);
    corpus_[q] = std::move(hits);
  }
}

FixtureSearchBackend::FixtureSearchBackend(std::unordered_map<std::string, std::vector<SearchHit>> corpus,
                                           std::uint64_t simulated_latency_ms)
    : corpus_(std::move(corpus)), latency_ms_(simulated_latency_ms) {}

SearchResponse FixtureSearchBackend::search(const std::string& query, int n) {
  SearchResponse out;
  out.latency_ms = latency_ms_;
  auto it = corpus_.find(query);
  if (it == corpus_.end()) {
    spdlog::info("fixture search: no corpus entry for query '{}'", query);
    return out;
  }
  auto count = std::min<std::size_t>(it->second.size(), static_cast<std::size_t>(std::max(0, n)));
  out.hits.assign(it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

RemoteSearchBackend::RemoteSearchBackend(RemoteSearchConfig cfg)
    : cfg_(std::move(cfg)), api_key_(detail::require_env(cfg_.api_key_env_var)) {
  if (cfg_.endpoint_url.empty()) throw ConfigError("remote search backend needs endpoint_url");
}

std::vector<SearchHit> parse_search_payload(std::string_view body) {
  std::vector<SearchHit> out;
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw SearchTransportError(std::string("search payload is not JSON: ") + e.what(), false);
  }
  auto take = [&](const json& arr, const char* title_key) {
    if (!arr.is_array()) return;
    for (const auto& r : arr) {
      SearchHit h{r.value(title_key, std::string{}), r.value("snippet", std::string{}), r.value("url", std::string{})};
      out.push_back(std::move(h));
    }
  };
  if (doc.contains("webPages") && doc["webPages"].contains("value")) {
    take(doc["webPages"]["value"], "name");
  } else if (doc.contains("results")) {
    take(doc["results"], "title");
  }
  return out;
}

SearchResponse RemoteSearchBackend::search(const std::string& query, int n) {
  auto url = cfg_.endpoint_url + (cfg_.endpoint_url.find('?') == std::string::npos ? "?" : "&") +
             "q=" + detail::url_encode(query) + "&count=" + std::to_string(n);
  auto start = std::chrono::steady_clock::now();
  detail::HttpResult res;
  try {
    res = with_retries(RetryPolicy{cfg_.max_retries, cfg_.retry_backoff_ms}, [&] {
      return detail::http_get(url, {{cfg_.api_key_header, api_key_}}, cfg_.timeout_ms);
    });
  } catch (const TransportError& e) {
    throw SearchTransportError(e.what(), false);
  }
  SearchResponse out;
  out.hits = parse_search_payload(res.body);
  if (static_cast<int>(out.hits.size()) > n) out.hits.resize(static_cast<std::size_t>(n));
  out.latency_ms = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                  std::chrono::steady_clock::now() - start)
                                                  .count());
  return out;
}

SearchResultGroup search(SearchBackend& backend, const std::string& query, int n, int query_index) {
  if (n < 1) throw std::invalid_argument("search: n must be positive");
  auto res = backend.search(query, n);
  SearchResultGroup g;
  g.query = query;
  g.query_index = query_index;
  g.latency_ms = res.latency_ms;
  int rank = 0;
  for (auto& h : res.hits) {
    if (static_cast<int>(g.instances.size()) == n) break;
    if (text::trim(h.title).empty() || text::trim(h.snippet).empty()) continue;
    KnowledgeSource src{SourceKind::external, query_index, ++rank, h.url};
    g.instances.push_back(KnowledgeInstance::make(std::move(h.title), std::move(h.snippet), std::move(src)));
  }
  return g;
}

// ---- BM25 -----------------------------------------------------------------

void Bm25Params::validate() const {
  if (!(k1 > 0)) throw std::invalid_argument("bm25: k1 must be > 0");
  if (!(b >= 0 && b <= 1)) throw std::invalid_argument("bm25: b must be in [0, 1]");
  if (passage_window_sentences < 1) throw std::invalid_argument("bm25: passage_window_sentences must be >= 1");
  if (passages_kept < 1) throw std::invalid_argument("bm25: passages_kept must be >= 1");
}

CorpusStats CorpusStats::build(const std::vector<std::vector<std::string>>& passages) {
  CorpusStats s;
  s.passage_count = passages.size();
  std::size_t total = 0;
  for (const auto& p : passages) {
    total += p.size();
    std::unordered_set<std::string_view> uniq(p.begin(), p.end());
    for (auto t : uniq) ++s.document_frequency[std::string(t)];
  }
  s.average_length = passages.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(passages.size());
  return s;
}

double bm25_score(const std::vector<std::string>& query_tokens, const std::vector<std::string>& passage,
                  const CorpusStats& stats, const Bm25Params& params) {
  if (query_tokens.empty() || passage.empty() || stats.passage_count == 0) return 0.0;
  std::unordered_map<std::string_view, std::size_t> tf;
  for (const auto& t : passage) ++tf[t];
  const double n = static_cast<double>(stats.passage_count);
  const double len = static_cast<double>(passage.size());
  const double avg = stats.average_length > 0 ? stats.average_length : len;
  double score = 0.0;
  for (const auto& q : query_tokens) {
    auto it = tf.find(q);
    if (it == tf.end()) continue;
    auto df_it = stats.document_frequency.find(q);
    double df = df_it == stats.document_frequency.end() ? 0.0 : static_cast<double>(df_it->second);
    double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    double f = static_cast<double>(it->second);
    score += idf * (f * (params.k1 + 1.0)) / (f + params.k1 * (1.0 - params.b + params.b * len / avg));
  }
  return score;
}

// ---- pages ----------------------------------------------------------------

FixturePageSource::FixturePageSource(const std::filesystem::path& manifest, std::uint64_t simulated_latency_ms)
    : latency_ms_(simulated_latency_ms) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open page manifest " + manifest.string());
  auto base = manifest.parent_path();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("page manifest: invalid JSON: ") + e.what(), lineno);
    }
    if (!rec.is_object() || !rec.contains("url") || !rec["url"].is_string() || !rec.contains("path") ||
        !rec["path"].is_string()) {
      throw FormatError("page manifest: record needs string fields url and path", lineno);
    }
    std::filesystem::path p = rec["path"].get<std::string>();
    pages_[rec["url"].get<std::string>()] = p.is_absolute() ? p : base / p;
  }
}

PageFetch FixturePageSource::fetch(const std::string& url) {
  auto it = pages_.find(url);
  if (it == pages_.end()) throw FetchError("no fixture page for " + url);
  std::ifstream in(it->second, std::ios::binary);
  if (!in) throw FetchError("cannot read fixture page " + it->second.string());
  PageFetch out;
  out.html.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  out.latency_ms = latency_ms_;
  return out;
}

HttpPageSource::HttpPageSource(int timeout_ms, RetryPolicy retry) : timeout_ms_(timeout_ms), retry_(retry) {}

PageFetch HttpPageSource::fetch(const std::string& url) {
  auto start = std::chrono::steady_clock::now();
  try {
    auto res = with_retries(retry_, [&] { return detail::http_get(url, {}, timeout_ms_); });
    PageFetch out;
    out.html = std::move(res.body);
    out.latency_ms = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                    std::chrono::steady_clock::now() - start)
                                                    .count());
    return out;
  } catch (const RagError& e) {
    throw FetchError("fetching " + url + ": " + e.what());
  }
}

namespace {

const std::unordered_set<std::string> kSkipElements = {"script", "style", "noscript", "template", "title", "head"};
const std::unordered_set<std::string> kBlockElements = {
    "p",      "div",     "br",     "li",   "ul",    "ol",         "h1",     "h2",    "h3",
    "h4",     "h5",      "h6",     "tr",   "td",    "th",         "table",  "section", "article",
    "header", "footer",  "nav",    "main", "aside", "blockquote", "pre",    "hr",    "body",
    "html",   "dd",      "dt",     "dl",   "figure", "figcaption", "form",  "tbody", "thead"};

std::string tag_name(std::string_view tag) {
  std::size_t i = 0;
  if (i < tag.size() && tag[i] == '/') ++i;
  std::string name;
  while (i < tag.size() && (std::isalnum(static_cast<unsigned char>(tag[i])))) {
    name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(tag[i]))));
    ++i;
  }
  return name;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::unordered_map<std::string_view, std::string_view> named = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    auto body = s.substr(i + 1, semi - i - 1);
    if (!body.empty() && body[0] == '#') {
      unsigned long cp = 0;
      try {
        cp = (body.size() > 1 && (body[1] == 'x' || body[1] == 'X'))
                 ? std::stoul(std::string(body.substr(2)), nullptr, 16)
                 : std::stoul(std::string(body.substr(1)), nullptr, 10);
      } catch (const std::exception&) {
        out.push_back('&');
        continue;
      }
      append_utf8(out, cp == 0xA0 ? 0x20 : cp);
      i = semi;
    } else if (auto it = named.find(body); it != named.end()) {
      out.append(it->second);
      i = semi;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

}  // namespace

std::string html_to_text(std::string_view html) {
  std::string out;
  std::size_t i = 0;
  while (i < html.size()) {
    char c = html[i];
    if (c != '<') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    auto close = html.find('>', i + 1);
    if (close == std::string_view::npos) break;
    auto tag = html.substr(i + 1, close - i - 1);
    auto name = tag_name(tag);
    bool closing = !tag.empty() && tag[0] == '/';
    i = close + 1;
    if (!closing && kSkipElements.count(name) && !(tag.size() && tag.back() == '/')) {
      // Skip to the matching close tag.
      auto lower = text::to_lower(html.substr(i));
      auto end = lower.find("</" + name);
      if (end == std::string::npos) {
        i = html.size();
      } else {
        auto gt = html.find('>', i + end);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      out.push_back('\n');
      continue;
    }
    if (kBlockElements.count(name)) out.push_back('\n');
  }
  return text::trim(decode_entities(out));
}

std::string html_title(std::string_view html) {
  auto lower = text::to_lower(html);
  auto open = lower.find("<title");
  if (open == std::string::npos) return {};
  auto gt = lower.find('>', open);
  if (gt == std::string::npos) return {};
  auto end = lower.find("</title", gt);
  if (end == std::string::npos) return {};
  return text::collapse_whitespace(decode_entities(html.substr(gt + 1, end - gt - 1)));
}

std::vector<std::string> split_sentences(std::string_view plain) {
  std::vector<std::string> out;
  auto push = [&](std::string s) {
    s = text::trim(s);
    if (!s.empty() && !text::word_tokens(s).empty()) out.push_back(std::move(s));
  };
  for (const auto& raw_line : text::split(plain, "\n")) {
    auto line = text::collapse_whitespace(raw_line);
    std::string cur;
    for (std::size_t i = 0; i < line.size(); ++i) {
      cur.push_back(line[i]);
      char c = line[i];
      if (c != '.' && c != '!' && c != '?') continue;
      // Absorb runs of terminators and closing quotes/brackets.
      while (i + 1 < line.size() && std::string_view(".!?\"')]").find(line[i + 1]) != std::string_view::npos) {
        cur.push_back(line[++i]);
      }
      if (i + 1 == line.size() || line[i + 1] == ' ') {
        push(std::move(cur));
        cur.clear();
      }
    }
    push(std::move(cur));
  }
  return out;
}

std::string distill_text(std::string_view plain_text, std::string_view query, const Bm25Params& params) {
  params.validate();
  auto sentences = split_sentences(plain_text);
  if (sentences.empty()) throw EmptyPage("page has no extractable text");

  const auto w = static_cast<std::size_t>(params.passage_window_sentences);
  std::vector<std::string> windows;
  for (std::size_t i = 0; i < sentences.size(); i += w) {
    std::vector<std::string> group(sentences.begin() + static_cast<std::ptrdiff_t>(i),
                                   sentences.begin() + static_cast<std::ptrdiff_t>(std::min(i + w, sentences.size())));
    windows.push_back(text::join(group, " "));
  }
  const auto kept = static_cast<std::size_t>(params.passages_kept);
  if (kept >= windows.size()) return text::join(windows, " ");

  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(windows.size());
  for (const auto& win : windows) tokens.push_back(text::word_tokens(win));
  auto stats = CorpusStats::build(tokens);
  auto qtok = text::word_tokens(query);

  std::vector<double> scores(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) scores[i] = bm25_score(qtok, tokens[i], stats, params);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(kept);
  std::sort(order.begin(), order.end());

  std::vector<std::string> picked;
  picked.reserve(order.size());
  for (auto i : order) picked.push_back(windows[i]);
  return text::join(picked, " ");
}

std::string fetch_and_distill(PageSource& source, const std::string& url, std::string_view query,
                              const Bm25Params& params) {
  if (text::trim(query).empty()) throw std::invalid_argument("fetch_and_distill: empty query");
  return distill_text(html_to_text(source.fetch(url).html), query, params);
}

// ---- arrangement ----------------------------------------------------------

std::string_view to_string(ArrangementOrder o) { return o == ArrangementOrder::sequential ? "sequential" : "mixed"; }

ArrangementOrder parse_arrangement(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "sequential") return ArrangementOrder::sequential;
  if (l == "mixed" || l == "mix") return ArrangementOrder::mixed;
  throw std::invalid_argument("unknown arrangement order '" + std::string(s) + "'");
}

std::vector<KnowledgeInstance> arrange(const std::vector<SearchResultGroup>& groups, ArrangementOrder order,
                                       std::size_t cap) {
  std::vector<const SearchResultGroup*> sorted;
  sorted.reserve(groups.size());
  for (const auto& g : groups) sorted.push_back(&g);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->query_index < b->query_index; });

  std::vector<KnowledgeInstance> out;
  std::unordered_set<std::string> seen;
  auto emit = [&](const KnowledgeInstance& k) {
    if (out.size() >= cap) return;
    if (seen.insert(k.id).second) out.push_back(k);
  };

  if (order == ArrangementOrder::sequential) {
    for (const auto* g : sorted) {
      for (const auto& k : g->instances) emit(k);
    }
    return out;
  }
  std::size_t longest = 0;
  for (const auto* g : sorted) longest = std::max(longest, g->instances.size());
  for (std::size_t r = 0; r < longest && out.size() < cap; ++r) {
    for (const auto* g : sorted) {
      if (r < g->instances.size()) emit(g->instances[r]);
    }
  }
  return out;
}

}  // namespace ragkit::retrieval
