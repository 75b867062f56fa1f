// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit::eval {

using nlohmann::json;

std::string normalize(std::string_view s) {
  std::string stripped;
  stripped.reserve(s.size());
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) continue;
    stripped.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
  }
  std::istringstream in(stripped);
  std::string tok;
  std::string out;
  while (in >> tok) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

namespace {

std::vector<std::string> tokens_of(std::string_view s) {
  std::istringstream in(normalize(s));
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

std::vector<std::string> normalized_answers(const std::vector<std::string>& answers) {
  std::vector<std::string> out;
  out.reserve(answers.size());
  for (const auto& a : answers) out.push_back(normalize(a));
  return out;
}

std::string instance_text(const KnowledgeInstance& k) { return normalize(k.title + " " + k.content); }

}  // namespace

bool hit(std::string_view response, const std::vector<std::string>& answers) {
  auto r = normalize(response);
  return std::any_of(answers.begin(), answers.end(),
                     [&](const std::string& a) { return r.find(normalize(a)) != std::string::npos; });
}

double token_f1(std::string_view response, const std::vector<std::string>& answers) {
  auto pred = tokens_of(response);
  double best = 0.0;
  for (const auto& a : answers) {
    auto gold = tokens_of(a);
    double f1 = 0.0;
    if (pred.empty() && gold.empty()) {
      f1 = 1.0;
    } else if (!pred.empty() && !gold.empty()) {
      std::unordered_map<std::string, int> counts;
      for (const auto& t : gold) ++counts[t];
      int common = 0;
      for (const auto& t : pred) {
        if (auto it = counts.find(t); it != counts.end() && it->second > 0) {
          --it->second;
          ++common;
        }
      }
      if (common > 0) {
        double p = static_cast<double>(common) / static_cast<double>(pred.size());
        double r = static_cast<double>(common) / static_cast<double>(gold.size());
        f1 = 2.0 * p * r / (p + r);
      }
    }
    best = std::max(best, f1);
  }
  return best;
}

bool exact_match(std::string_view response, const std::vector<std::string>& answers) {
  auto r = normalize(response);
  return std::any_of(answers.begin(), answers.end(), [&](const std::string& a) { return normalize(a) == r; });
}

double answer_recall(const std::vector<KnowledgeInstance>& knowledge, const std::vector<std::string>& answers) {
  if (answers.empty()) return 0.0;
  std::vector<std::string> texts;
  texts.reserve(knowledge.size());
  for (const auto& k : knowledge) texts.push_back(instance_text(k));
  std::size_t found = 0;
  for (const auto& a : normalized_answers(answers)) {
    if (std::any_of(texts.begin(), texts.end(), [&](const std::string& t) { return t.find(a) != std::string::npos; })) {
      ++found;
    }
  }
  return static_cast<double>(found) / static_cast<double>(answers.size());
}

double snippet_precision(const std::vector<KnowledgeInstance>& knowledge, const std::vector<std::string>& answers) {
  if (knowledge.empty()) return 0.0;
  auto norm = normalized_answers(answers);
  std::size_t with_answer = 0;
  for (const auto& k : knowledge) {
    auto t = instance_text(k);
    if (std::any_of(norm.begin(), norm.end(), [&](const std::string& a) { return t.find(a) != std::string::npos; })) {
      ++with_answer;
    }
  }
  return static_cast<double>(with_answer) / static_cast<double>(knowledge.size());
}

// ---- datasets -------------------------------------------------------------

namespace {

QaItem item_from_json(const json& rec) {
  if (!rec.is_object()) throw std::runtime_error("record is not an object");
  QaItem it;
  if (!rec.contains("id")) throw std::runtime_error("missing id");
  if (rec["id"].is_string()) {
    it.id = rec["id"].get<std::string>();
  } else if (rec["id"].is_number_integer()) {
    it.id = std::to_string(rec["id"].get<long long>());
  } else {
    throw std::runtime_error("id must be a string or integer");
  }
  if (text::trim(it.id).empty()) throw std::runtime_error("empty id");
  if (!rec.contains("question") || !rec["question"].is_string()) throw std::runtime_error("missing question");
  it.question = rec["question"].get<std::string>();
  if (text::trim(it.question).empty()) throw std::runtime_error("empty question");
  if (!rec.contains("answers") || !rec["answers"].is_array()) throw std::runtime_error("answers must be an array");
  for (const auto& a : rec["answers"]) {
    if (!a.is_string() || text::trim(a.get<std::string>()).empty()) {
      throw std::runtime_error("answers must be non-empty strings");
    }
    it.answers.push_back(a.get<std::string>());
  }
  if (it.answers.empty()) throw std::runtime_error("answers is empty");
  return it;
}

}  // namespace

std::vector<QaItem> load_dataset(const std::filesystem::path& path, bool strict, std::vector<std::string>* problems) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::vector<QaItem> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto item = item_from_json(json::parse(line));
      if (!ids.insert(item.id).second) throw std::runtime_error("duplicate id '" + item.id + "'");
      out.push_back(std::move(item));
    } catch (const std::exception& e) {
      std::string msg = std::string("dataset: ") + e.what();
      if (strict) throw FormatError(msg, lineno);
      spdlog::warn("{}:{}: skipping: {}", path.string(), lineno, e.what());
      if (problems) problems->push_back(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<QaItem>& items) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  for (const auto& it : items) {
    nlohmann::ordered_json j;
    j["id"] = it.id;
    j["question"] = it.question;
    j["answers"] = it.answers;
    out << j.dump() << '\n';
  }
}

PublicFormat parse_public_format(std::string_view s) {
  auto l = text::to_lower(text::trim(s));
  if (l == "nq") return PublicFormat::nq;
  if (l == "popqa") return PublicFormat::popqa;
  if (l == "ambignq") return PublicFormat::ambignq;
  if (l == "hotpotqa") return PublicFormat::hotpotqa;
  if (l == "2wikimqa" || l == "twowikimqa") return PublicFormat::twowikimqa;
  throw std::invalid_argument("unknown dataset format '" + std::string(s) + "'");
}

namespace {

std::vector<json> read_json_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto first = all.find_first_not_of(" \t\r\n");
  std::vector<json> out;
  if (first != std::string::npos && all[first] == '[') {
    try {
      for (auto& r : json::parse(all)) out.push_back(std::move(r));
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("invalid JSON array: ") + e.what());
    }
    return out;
  }
  std::istringstream lines(all);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), lineno);
    }
  }
  return out;
}

std::string id_of(const json& r, const char* key, std::size_t index, const char* prefix) {
  if (r.contains(key)) {
    if (r[key].is_string()) return r[key].get<std::string>();
    if (r[key].is_number_integer()) return std::to_string(r[key].get<long long>());
  }
  return std::string(prefix) + "-" + std::to_string(index);
}

void add_answers(std::vector<std::string>& out, const json& v) {
  auto push = [&](const std::string& a) {
    if (!text::trim(a).empty() && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  };
  if (v.is_string()) {
    push(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& a : v) add_answers(out, a);
  }
}

}  // namespace

std::vector<QaItem> convert_public(PublicFormat format, const std::filesystem::path& path) {
  auto records = read_json_records(path);
  std::vector<QaItem> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    QaItem it;
    it.question = r.value("question", std::string{});
    switch (format) {
      case PublicFormat::nq:
        it.id = id_of(r, "id", i, "nq");
        add_answers(it.answers, r.contains("answer") ? r["answer"] : r.value("answers", json::array()));
        break;
      case PublicFormat::popqa: {
        it.id = id_of(r, "id", i, "popqa");
        const auto& pa = r.contains("possible_answers") ? r["possible_answers"] : json();
        // Distributed as a JSON-encoded string.
        add_answers(it.answers, pa.is_string() ? json::parse(pa.get<std::string>()) : pa);
        break;
      }
      case PublicFormat::ambignq:
        it.id = id_of(r, "id", i, "ambignq");
        if (r.contains("annotations")) {
          for (const auto& ann : r["annotations"]) {
            if (ann.value("type", std::string{}) == "singleAnswer") {
              add_answers(it.answers, ann.value("answer", json::array()));
            } else if (ann.contains("qaPairs")) {
              for (const auto& qa : ann["qaPairs"]) add_answers(it.answers, qa.value("answer", json::array()));
            }
          }
        }
        break;
      case PublicFormat::hotpotqa:
      case PublicFormat::twowikimqa:
        it.id = id_of(r, "_id", i, format == PublicFormat::hotpotqa ? "hotpotqa" : "2wikimqa");
        add_answers(it.answers, r.value("answer", json()));
        if (r.contains("answer_aliases")) add_answers(it.answers, r["answer_aliases"]);
        break;
    }
    if (text::trim(it.question).empty() || it.answers.empty()) {
      throw FormatError("record " + std::to_string(i + 1) + " has no question or answers");
    }
    out.push_back(std::move(it));
  }
  return out;
}

// ---- reports --------------------------------------------------------------

std::vector<EvalReport> evaluate_run(const std::vector<QaRecord>& records, const std::vector<QaItem>& items,
                                     const std::string& dataset_tag) {
  std::unordered_map<std::string, const QaItem*> by_id;
  for (const auto& it : items) by_id[it.id] = &it;

  struct Acc {
    EvalReport rep;
    double f1_sum = 0, em = 0;
  };
  std::vector<Acc> accs;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& r : records) {
    auto it = by_id.find(r.question_id);
    if (it == by_id.end()) throw UnknownQuestionId("record references unknown question id '" + r.question_id + "'");
    auto [pos, fresh] = slot.emplace(r.mode, accs.size());
    if (fresh) {
      Acc a;
      a.rep.dataset_tag = dataset_tag;
      a.rep.method = r.mode;
      a.rep.question_form = r.question_form;
      a.rep.knowledge_use = r.knowledge_use;
      accs.push_back(std::move(a));
    }
    auto& a = accs[pos->second];
    ++a.rep.n_questions;
    if (r.failed) continue;
    const auto& answers = it->second->answers;
    if (hit(r.response, answers)) ++a.rep.hits;
    a.f1_sum += token_f1(r.response, answers);
    if (exact_match(r.response, answers)) a.em += 1;
  }
  std::vector<EvalReport> out;
  for (auto& a : accs) {
    auto n = static_cast<double>(a.rep.n_questions);
    a.rep.f1_mean = 100.0 * a.f1_sum / n;
    a.rep.hit_rate_pct = 100.0 * static_cast<double>(a.rep.hits) / n;
    a.rep.em_pct = 100.0 * a.em / n;
    out.push_back(std::move(a.rep));
  }
  return out;
}

std::string method_label(const EvalReport& r) {
  try {
    return std::string(display_name(parse_mode(r.method)));
  } catch (const std::invalid_argument&) {
    return r.method;
  }
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

namespace {

std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) s += " | ";
      s += cells[c];
      if (c + 1 < cells.size()) s.append(width[c] - cells[c].size(), ' ');
    }
    return s + "\n";
  };
  std::string out = line(header);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += "-+-";
    out.append(width[c], '-');
  }
  out += "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_table(const std::vector<EvalReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) rows.push_back({r.dataset_tag, method_label(r), fixed2(r.f1_mean), fixed2(r.hit_rate_pct)});
  return render({"Dataset", "Method", "F1", "Hit Rate"}, rows);
}

std::string to_csv(const std::vector<EvalReport>& reports) {
  std::string out = "dataset,method,F1,hit_rate\n";
  for (const auto& r : reports) {
    out += csv_field(r.dataset_tag) + "," + csv_field(method_label(r)) + "," + fixed2(r.f1_mean) + "," +
           fixed2(r.hit_rate_pct) + "\n";
  }
  return out;
}

std::string format_ablation_table(const std::vector<EvalReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    rows.push_back({r.dataset_tag, r.question_form, r.knowledge_use, fixed2(r.f1_mean), fixed2(r.hit_rate_pct)});
  }
  return render({"Dataset", "Question", "Knowledge", "F1", "Hit Rate"}, rows);
}

std::string to_ablation_csv(const std::vector<EvalReport>& reports) {
  std::string out = "dataset,question,knowledge,F1,hit_rate\n";
  for (const auto& r : reports) {
    out += csv_field(r.dataset_tag) + "," + r.question_form + "," + r.knowledge_use + "," + fixed2(r.f1_mean) + "," +
           fixed2(r.hit_rate_pct) + "\n";
  }
  return out;
}

}  // namespace ragkit::eval
