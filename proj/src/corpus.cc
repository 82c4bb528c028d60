// Copyright 2026 The vreward Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vreward/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "vreward/batch.h"
#include "vreward/errors.h"
#include "vreward/jsonl.h"

namespace vreward {
namespace {

using nlohmann::json;

std::string where(std::size_t line_number) {
  return line_number > 0 ? "line " + std::to_string(line_number) + ": " : "";
}

[[noreturn]] void field_error(std::size_t line_number, std::string_view field,
                              std::string_view message) {
  throw ValidationError(where(line_number) + "field '" + std::string(field) +
                        "': " + std::string(message));
}

std::string required_string(const json& j, std::string_view field,
                            std::size_t line_number) {
  auto it = j.find(std::string(field));
  if (it == j.end()) field_error(line_number, field, "missing");
  if (!it->is_string()) field_error(line_number, field, "expected a string");
  return it->get<std::string>();
}

double required_number(const json& j, std::string_view field,
                       std::size_t line_number) {
  auto it = j.find(std::string(field));
  if (it == j.end()) field_error(line_number, field, "missing");
  if (!it->is_number()) field_error(line_number, field, "expected a number");
  return it->get<double>();
}

std::string round_trip(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw InputError("error reading '" + path.string() + "'");
  return buffer.str();
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_number = 0;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_number;
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      fn(line, line_number);
    }
    begin = end + 1;
  }
}

json parse_json_object(std::string_view line, std::size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError(where(line_number) + "invalid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError(where(line_number) + "expected a JSON object");
  }
  return j;
}

std::string_view gold_kind_name(GoldKind kind) {
  switch (kind) {
    case GoldKind::kOptionLabel: return "option";
    case GoldKind::kNumericRange: return "range";
    case GoldKind::kLiteralValue: return "literal";
    case GoldKind::kReferenceText: return "text";
  }
  return "text";
}

double percent(long long part, long long whole) {
  return whole > 0 ? 100.0 * static_cast<double>(part) / static_cast<double>(whole)
                   : 0.0;
}

}  // namespace

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  if (name == "mcq") return TaskKind::kMultipleChoice;
  if (name == "numeric") return TaskKind::kNumeric;
  if (name == "open") return TaskKind::kOpenText;
  return std::nullopt;
}

QARecord parse_record_line(std::string_view line, std::size_t line_number) {
  const json j = parse_json_object(line, line_number);
  QARecord record;
  record.id = required_string(j, "id", line_number);
  if (record.id.empty()) field_error(line_number, "id", "must be non-empty");
  if (j.contains("question")) {
    record.question = required_string(j, "question", line_number);
  }
  if (j.contains("source")) record.source = required_string(j, "source", line_number);

  const std::string kind = required_string(j, "kind", line_number);
  try {
    if (kind == "option") {
      const std::string gold = required_string(j, "gold", line_number);
      if (gold.size() != 1) field_error(line_number, "gold", "expected one option letter");
      record.gold = GoldAnswer::option_label(gold[0]);
    } else if (kind == "range") {
      const double lower = required_number(j, "lower", line_number);
      const double upper = required_number(j, "upper", line_number);
      if (lower > upper) field_error(line_number, "lower", "lower > upper");
      record.gold = GoldAnswer::numeric_range(lower, upper);
    } else if (kind == "literal") {
      record.gold = GoldAnswer::literal_value(required_string(j, "gold", line_number));
    } else if (kind == "text") {
      record.gold = GoldAnswer::reference_text(required_string(j, "gold", line_number));
    } else {
      field_error(line_number, "kind",
                  "unknown kind '" + kind + "' (expected option|range|literal|text)");
    }
  } catch (const ValidationError& e) {
    const std::string message = e.what();
    if (message.rfind("line ", 0) == 0) throw;
    field_error(line_number, "gold", message);
  }

  if (auto it = j.find("target_length"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<long long>() <= 0) {
      field_error(line_number, "target_length", "expected a positive integer");
    }
    record.target_length = it->get<int>();
  }
  return record;
}

std::string record_to_line(const QARecord& record) {
  JsonLine line;
  line.add("id", record.id)
      .add("question", record.question)
      .add("kind", gold_kind_name(record.gold.kind));
  switch (record.gold.kind) {
    case GoldKind::kOptionLabel:
      line.add("gold", std::string(1, *record.gold.option));
      break;
    case GoldKind::kNumericRange:
      line.add_raw("lower", round_trip(*record.gold.lower))
          .add_raw("upper", round_trip(*record.gold.upper));
      break;
    case GoldKind::kLiteralValue:
      line.add("gold", *record.gold.literal);
      break;
    case GoldKind::kReferenceText:
      line.add("gold", *record.gold.reference);
      break;
  }
  if (record.target_length) {
    line.add("target_length", *record.target_length);
  } else {
    line.add_null("target_length");
  }
  line.add("source", record.source);
  return line.str();
}

std::vector<QARecord> parse_records(std::string_view text) {
  std::vector<QARecord> records;
  std::set<std::string> seen;
  for_each_line(text, [&](std::string_view line, std::size_t line_number) {
    QARecord record = parse_record_line(line, line_number);
    if (!seen.insert(record.id).second) {
      throw ValidationError(where(line_number) + "duplicate id '" + record.id + "'");
    }
    records.push_back(std::move(record));
  });
  return records;
}

std::vector<QARecord> load_records(const std::filesystem::path& path) {
  return parse_records(read_file(path));
}

void write_records(const std::filesystem::path& path,
                   std::span<const QARecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (const QARecord& record : records) out << record_to_line(record) << '\n';
  if (!out) throw InputError("error writing '" + path.string() + "'");
}

Predictions parse_predictions(std::string_view text) {
  Predictions predictions;
  for_each_line(text, [&](std::string_view line, std::size_t line_number) {
    const json j = parse_json_object(line, line_number);
    std::string id = required_string(j, "id", line_number);
    std::string response = required_string(j, "response", line_number);
    if (!predictions.emplace(std::move(id), std::move(response)).second) {
      throw ValidationError(where(line_number) + "duplicate prediction id");
    }
  });
  return predictions;
}

Predictions load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

RecordVerdict score_record(const QARecord& record, const std::string* response,
                           const RewardConfig& config) {
  RecordVerdict verdict;
  if (response == nullptr) {
    verdict.missing = true;
    return verdict;
  }
  const ParsedResponse parsed = parse_response(*response, config.length_unit);
  verdict.format_ok = parsed.format_ok;
  if (!parsed.format_ok) return verdict;
  verdict.correct = correctness_reward(parsed, record.gold, config).reward > 0;
  if (record.gold.kind == GoldKind::kReferenceText) {
    verdict.rouge = rouge_l(*parsed.answer_span, *record.gold.reference).value();
    verdict.ems =
        exact_match(*parsed.answer_span, *record.gold.reference, config.ems_mode).value();
  }
  return verdict;
}

EvalReport aggregate(std::span<const QARecord> records,
                     std::span<const RecordVerdict> verdicts) {
  if (records.size() != verdicts.size()) {
    throw UsageError("aggregate: records and verdicts differ in length");
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].id < records[b].id;
  });

  struct Sums {
    GroupStats stats;
    double rouge = 0.0;
    double ems = 0.0;
  };
  std::map<std::pair<std::string, int>, Sums> groups;
  EvalReport report;
  for (std::size_t i : order) {
    const QARecord& record = records[i];
    const RecordVerdict& v = verdicts[i];
    Sums& sums = groups[{record.source, static_cast<int>(record.kind())}];
    sums.stats.source = record.source;
    sums.stats.kind = record.kind();
    ++sums.stats.count;
    sums.stats.correct += v.correct ? 1 : 0;
    sums.stats.compliant += v.format_ok ? 1 : 0;
    sums.stats.missing += v.missing ? 1 : 0;
    sums.rouge += v.rouge;
    sums.ems += v.ems;
    ++report.count;
    report.compliant += v.format_ok ? 1 : 0;
    if (v.missing) report.missing_ids.push_back(record.id);
  }
  for (auto& [key, sums] : groups) {
    GroupStats stats = sums.stats;
    stats.accuracy = percent(stats.correct, stats.count);
    if (stats.kind == TaskKind::kOpenText) {
      stats.mean_rouge = sums.rouge / static_cast<double>(stats.count);
      stats.mean_ems = sums.ems / static_cast<double>(stats.count);
    }
    report.groups.push_back(std::move(stats));
  }
  report.format_compliance = percent(report.compliant, report.count);
  return report;
}

EvalReport evaluate(std::span<const QARecord> records,
                    const Predictions& predictions, const RewardConfig& config) {
  config.validate();
  const std::vector<RecordVerdict> verdicts =
      score_records(records, predictions, config);
  return aggregate(records, verdicts);
}

std::string report_to_jsonl(const EvalReport& report) {
  std::string out;
  for (const GroupStats& g : report.groups) {
    out += JsonLine()
               .add("record", "group")
               .add("source", g.source)
               .add("kind", to_string(g.kind))
               .add("count", g.count)
               .add("correct", g.correct)
               .add("compliant", g.compliant)
               .add("missing", g.missing)
               .add("accuracy", g.accuracy)
               .add_optional("mean_rouge", g.mean_rouge)
               .add_optional("mean_ems", g.mean_ems)
               .str();
    out += '\n';
  }
  json missing = json::array();
  for (const auto& id : report.missing_ids) missing.push_back(id);
  out += JsonLine()
             .add("record", "summary")
             .add("count", report.count)
             .add("compliant", report.compliant)
             .add("format_compliance", report.format_compliance)
             .add_raw("missing_ids", missing.dump(-1, ' ', false,
                                                  json::error_handler_t::replace))
             .str();
  out += '\n';
  return out;
}

EvalReport parse_report_jsonl(std::string_view text) {
  EvalReport report;
  bool have_summary = false;
  for_each_line(text, [&](std::string_view line, std::size_t line_number) {
    const json j = parse_json_object(line, line_number);
    try {
      const std::string kind = j.at("record").get<std::string>();
      if (kind == "group") {
        GroupStats g;
        g.source = j.at("source").get<std::string>();
        const auto task = parse_task_kind(j.at("kind").get<std::string>());
        if (!task) field_error(line_number, "kind", "unknown task kind");
        g.kind = *task;
        g.count = j.at("count").get<long long>();
        g.correct = j.at("correct").get<long long>();
        g.compliant = j.at("compliant").get<long long>();
        g.missing = j.at("missing").get<long long>();
        g.accuracy = j.at("accuracy").get<double>();
        if (!j.at("mean_rouge").is_null()) g.mean_rouge = j.at("mean_rouge").get<double>();
        if (!j.at("mean_ems").is_null()) g.mean_ems = j.at("mean_ems").get<double>();
        report.groups.push_back(std::move(g));
      } else if (kind == "summary") {
        report.count = j.at("count").get<long long>();
        report.compliant = j.at("compliant").get<long long>();
        report.format_compliance = j.at("format_compliance").get<double>();
        report.missing_ids = j.at("missing_ids").get<std::vector<std::string>>();
        have_summary = true;
      } else {
        field_error(line_number, "record", "expected group or summary");
      }
    } catch (const json::exception& e) {
      throw ValidationError(where(line_number) + e.what());
    }
  });
  if (!have_summary) throw ValidationError("report has no summary record");
  return report;
}

std::string report_to_table(const EvalReport& report) {
  std::string out = fmt::format("{:<24} {:<8} {:>6} {:>9} {:>9} {:>9}\n", "source",
                                "kind", "count", "accuracy", "rouge_l", "ems");
  for (const GroupStats& g : report.groups) {
    out += fmt::format("{:<24} {:<8} {:>6} {:>9} {:>9} {:>9}\n", g.source,
                       to_string(g.kind), g.count, fixed4(g.accuracy),
                       g.mean_rouge ? fixed4(*g.mean_rouge) : "-",
                       g.mean_ems ? fixed4(*g.mean_ems) : "-");
  }
  out += fmt::format("records {}  format compliance {}%  missing {}\n", report.count,
                     fixed4(report.format_compliance), report.missing_ids.size());
  for (const auto& id : report.missing_ids) out += "  missing: " + id + "\n";
  return out;
}

}  // namespace vreward
