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

#include "vreward/batch.h"

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vreward/errors.h"

namespace vreward {
namespace {

void check_aligned(std::size_t responses, std::size_t records) {
  if (responses != records) {
    throw UsageError("score_responses: responses and records differ in length");
  }
}

const std::string* lookup(const Predictions& predictions, const std::string& id) {
  auto it = predictions.find(id);
  return it == predictions.end() ? nullptr : &it->second;
}

}  // namespace

std::vector<RewardBreakdown> score_responses(std::span<const std::string> responses,
                                             std::span<const QARecord> records,
                                             const RewardConfig& config) {
  check_aligned(responses.size(), records.size());
  std::vector<RewardBreakdown> out(responses.size());
  const auto n = static_cast<std::ptrdiff_t>(responses.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = total_reward(responses[i], records[i], config);
  }
  return out;
}

std::vector<RewardBreakdown> score_responses_serial(
    std::span<const std::string> responses, std::span<const QARecord> records,
    const RewardConfig& config) {
  check_aligned(responses.size(), records.size());
  std::vector<RewardBreakdown> out;
  out.reserve(responses.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    out.push_back(total_reward(responses[i], records[i], config));
  }
  return out;
}

std::vector<RecordVerdict> score_records(std::span<const QARecord> records,
                                         const Predictions& predictions,
                                         const RewardConfig& config) {
  std::vector<RecordVerdict> out(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = score_record(records[i], lookup(predictions, records[i].id), config);
  }
  return out;
}

std::vector<RecordVerdict> score_records_serial(std::span<const QARecord> records,
                                                const Predictions& predictions,
                                                const RewardConfig& config) {
  std::vector<RecordVerdict> out;
  out.reserve(records.size());
  for (const QARecord& record : records) {
    out.push_back(score_record(record, lookup(predictions, record.id), config));
  }
  return out;
}

int parallel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace vreward
