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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vreward/record.h"
#include "vreward/reward.h"

namespace vreward {

// Record files hold one JSON object per line:
//   {"id": "...", "question": "...", "kind": "option|range|literal|text",
//    "gold": "...",                 (option, literal, text)
//    "lower": 1.0, "upper": 2.0,   (range)
//    "target_length": 24,           (optional)
//    "source": "..."}
// Blank lines are skipped.
QARecord parse_record_line(std::string_view line, std::size_t line_number = 0);
std::string record_to_line(const QARecord& record);

// Throws InputError when the file cannot be read, ValidationError naming the
// line and field for malformed lines, and ValidationError on duplicate ids.
std::vector<QARecord> load_records(const std::filesystem::path& path);
std::vector<QARecord> parse_records(std::string_view text);
void write_records(const std::filesystem::path& path,
                   std::span<const QARecord> records);

// Prediction files: {"id": "...", "response": "..."} per line.
using Predictions = std::map<std::string, std::string>;
Predictions load_predictions(const std::filesystem::path& path);
Predictions parse_predictions(std::string_view text);

// Outcome of scoring one record's prediction. Missing predictions and
// malformed responses are incorrect and score 0 on the text metrics.
struct RecordVerdict {
  bool missing = false;
  bool format_ok = false;
  bool correct = false;
  double rouge = 0.0;
  double ems = 0.0;
};

RecordVerdict score_record(const QARecord& record, const std::string* response,
                           const RewardConfig& config);

struct GroupStats {
  std::string source;
  TaskKind kind = TaskKind::kMultipleChoice;
  long long count = 0;
  long long correct = 0;
  long long compliant = 0;
  long long missing = 0;
  double accuracy = 0.0;
  // Filled for open-text groups only.
  std::optional<double> mean_rouge;
  std::optional<double> mean_ems;

  bool operator==(const GroupStats&) const = default;
};

// Accuracy and compliance are percentages. Groups are ordered by
// (source, kind); missing ids are sorted.
struct EvalReport {
  std::vector<GroupStats> groups;
  long long count = 0;
  long long compliant = 0;
  double format_compliance = 0.0;
  std::vector<std::string> missing_ids;

  bool operator==(const EvalReport&) const = default;
};

EvalReport evaluate(std::span<const QARecord> records,
                    const Predictions& predictions, const RewardConfig& config);

// Reduces per-record verdicts (aligned with `records`) into a report. The
// reduction runs in id order so the result does not depend on input order.
EvalReport aggregate(std::span<const QARecord> records,
                     std::span<const RecordVerdict> verdicts);

// One {"record":"group",...} line per group followed by one
// {"record":"summary",...} line. Reals use four decimals.
std::string report_to_jsonl(const EvalReport& report);
EvalReport parse_report_jsonl(std::string_view text);
std::string report_to_table(const EvalReport& report);

std::optional<TaskKind> parse_task_kind(std::string_view name);

}  // namespace vreward
