#pragma once

// Task records and JSONL corpus ingestion.

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "html.hpp"

namespace mtsim {

using html::DocStructure;

struct MicroTask {
  std::string id;
  std::string title;
  std::string description_html;
  std::string description_text;  // derived by strip_html
  std::string proof;
  std::string category;
  std::string employer;
  double payment = 0.0;         // USD
  double time_to_finish = 0.0;  // minutes
  double time_to_rate = 0.0;    // days
  std::int64_t positions = 0;
  std::int64_t jobs_done = 0;
  double success_rate = 0.0;
  std::vector<std::string> countries;  // uppercase, sorted, unique; empty = all
  DocStructure structure;              // derived by strip_html

  /// Fills description_text and structure from description_html.
  void derive() {
    auto stripped = html::strip_html(description_html);
    description_text = std::move(stripped.text);
    structure = std::move(stripped.structure);
  }
};

struct Corpus {
  std::vector<MicroTask> tasks;  // load order
  std::map<std::string, std::size_t> category_counts;

  std::size_t size() const { return tasks.size(); }

  /// Distinct categories in lexicographic order.
  std::vector<std::string> categories() const {
    std::vector<std::string> out;
    for (const auto& [c, n] : category_counts) out.push_back(c);
    return out;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) out.push_back(t.category);
    return out;
  }

  void add(MicroTask task) {
    ++category_counts[task.category];
    tasks.push_back(std::move(task));
  }

  /// Subset in the given index order.
  Corpus subset(const std::vector<std::size_t>& indices) const {
    Corpus out;
    for (auto i : indices) out.add(tasks.at(i));
    return out;
  }
};

/// Ingestion diagnostics. Missing optional numeric fields are counted per
/// field name; skipped records only occur in lenient mode.
struct QualityReport {
  std::size_t lines_read = 0;
  std::size_t records_loaded = 0;
  std::size_t records_skipped = 0;
  std::size_t unknown_fields = 0;
  std::map<std::string, std::size_t> defaulted_fields;
  std::vector<std::string> problems;  // "line N: message", in file order
};

struct LoadResult {
  Corpus corpus;
  QualityReport report;
};

namespace corpus_detail {

using nlohmann::json;

inline const std::set<std::string>& known_fields() {
  static const std::set<std::string> f = {
      "id",             "title",        "description_html", "proof",     "category",
      "employer",       "payment",      "time_to_finish",   "time_to_rate", "positions",
      "jobs_done",      "success_rate", "countries"};
  return f;
}

inline std::string required_string(const json& rec, const char* field) {
  const auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) throw InvalidArgument(std::string("missing required field '") + field + "'");
  if (!it->is_string()) throw InvalidArgument(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

inline std::string optional_string(const json& rec, const char* field) {
  const auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) return {};
  if (!it->is_string()) throw InvalidArgument(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

inline double optional_number(const json& rec, const char* field, QualityReport& report) {
  const auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) {
    ++report.defaulted_fields[field];
    return 0.0;
  }
  if (!it->is_number()) throw InvalidArgument(std::string("field '") + field + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw InvalidArgument(std::string("field '") + field + "' must be finite");
  return v;
}

inline std::int64_t optional_count(const json& rec, const char* field, QualityReport& report) {
  const auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) {
    ++report.defaulted_fields[field];
    return 0;
  }
  if (!it->is_number_integer()) throw InvalidArgument(std::string("field '") + field + "' must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < 0) throw InvalidArgument(std::string("field '") + field + "' must be >= 0");
  return v;
}

}  // namespace corpus_detail

/// Builds a validated task from one JSON object. Throws InvalidArgument
/// naming the offending field.
inline MicroTask parse_task(const nlohmann::json& rec, QualityReport& report) {
  using namespace corpus_detail;
  if (!rec.is_object()) throw InvalidArgument("record is not a JSON object");
  MicroTask t;
  t.id = required_string(rec, "id");
  if (t.id.empty()) throw InvalidArgument("field 'id' must not be empty");
  t.description_html = required_string(rec, "description_html");
  t.category = required_string(rec, "category");
  if (t.category.empty()) throw InvalidArgument("field 'category' must not be empty");
  t.title = optional_string(rec, "title");
  t.proof = optional_string(rec, "proof");
  t.employer = optional_string(rec, "employer");

  t.payment = optional_number(rec, "payment", report);
  if (t.payment < 0) throw InvalidArgument("invariant violated: payment >= 0");
  const bool has_ttf = rec.contains("time_to_finish") && !rec["time_to_finish"].is_null();
  t.time_to_finish = optional_number(rec, "time_to_finish", report);
  if (has_ttf && !(t.time_to_finish > 0)) throw InvalidArgument("invariant violated: time_to_finish > 0");
  t.time_to_rate = optional_number(rec, "time_to_rate", report);
  if (t.time_to_rate < 0) throw InvalidArgument("invariant violated: time_to_rate >= 0");
  t.positions = optional_count(rec, "positions", report);
  t.jobs_done = optional_count(rec, "jobs_done", report);
  t.success_rate = optional_number(rec, "success_rate", report);
  if (t.success_rate < 0 || t.success_rate > 1)
    throw InvalidArgument("invariant violated: success_rate in [0,1]");

  if (const auto it = rec.find("countries"); it != rec.end() && !it->is_null()) {
    if (!it->is_array()) throw InvalidArgument("field 'countries' must be an array");
    std::set<std::string> codes;
    for (const auto& c : *it) {
      if (!c.is_string()) throw InvalidArgument("field 'countries' must contain strings");
      std::string code = c.get<std::string>();
      for (char& ch : code) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (!code.empty()) codes.insert(code);
    }
    t.countries.assign(codes.begin(), codes.end());
  }

  for (const auto& [key, value] : rec.items())
    if (!known_fields().count(key)) ++report.unknown_fields;

  t.derive();
  return t;
}

/// Reads a JSONL corpus from a stream. Strict mode throws ParseError on the
/// first invalid record; lenient mode skips and records it.
inline LoadResult load_corpus(std::istream& in, bool strict) {
  LoadResult result;
  auto& report = result.report;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::detail::trim(line).empty()) continue;
    ++report.lines_read;
    try {
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("malformed JSON: ") + e.what());
      }
      QualityReport scratch;
      MicroTask task = parse_task(rec, scratch);
      if (!ids.insert(task.id).second) throw InvalidArgument("duplicate id '" + task.id + "'");
      for (const auto& [f, n] : scratch.defaulted_fields) report.defaulted_fields[f] += n;
      report.unknown_fields += scratch.unknown_fields;
      result.corpus.add(std::move(task));
      ++report.records_loaded;
    } catch (const InvalidArgument& e) {
      if (strict) throw ParseError(e.what(), line_no);
      ++report.records_skipped;
      report.problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return result;
}

inline LoadResult load_corpus(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  return load_corpus(in, strict);
}

/// Serializes a task back into its JSONL record (derived fields omitted).
inline nlohmann::ordered_json to_json(const MicroTask& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["title"] = t.title;
  j["description_html"] = t.description_html;
  j["proof"] = t.proof;
  j["category"] = t.category;
  j["employer"] = t.employer;
  j["payment"] = t.payment;
  j["time_to_finish"] = t.time_to_finish;
  j["time_to_rate"] = t.time_to_rate;
  j["positions"] = t.positions;
  j["jobs_done"] = t.jobs_done;
  j["success_rate"] = t.success_rate;
  j["countries"] = t.countries;
  return j;
}

}  // namespace mtsim
