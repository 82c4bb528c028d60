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

#include <span>
#include <string>
#include <vector>

#include "vreward/corpus.h"
#include "vreward/reward.h"

namespace vreward {

// Data-parallel scoring kernels. Each parallel kernel has a serial twin that
// is kept as the reference implementation for tests and benchmarks; both
// produce identical results element for element.

// responses[i] is scored against records[i].
std::vector<RewardBreakdown> score_responses(std::span<const std::string> responses,
                                             std::span<const QARecord> records,
                                             const RewardConfig& config);
std::vector<RewardBreakdown> score_responses_serial(
    std::span<const std::string> responses, std::span<const QARecord> records,
    const RewardConfig& config);

// One verdict per record, looking predictions up by id.
std::vector<RecordVerdict> score_records(std::span<const QARecord> records,
                                         const Predictions& predictions,
                                         const RewardConfig& config);
std::vector<RecordVerdict> score_records_serial(std::span<const QARecord> records,
                                                const Predictions& predictions,
                                                const RewardConfig& config);

// Worker threads available to the parallel kernels (1 without OpenMP).
int parallel_threads();

}  // namespace vreward
