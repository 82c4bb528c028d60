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

#include <gtest/gtest.h>

#include "fixtures.h"
#include "vreward/errors.h"

namespace vreward {
namespace {

bool same(const RewardBreakdown& a, const RewardBreakdown& b) {
  return a.r_format == b.r_format && a.r_correct == b.r_correct &&
         a.r_length == b.r_length && a.raw_metric == b.raw_metric &&
         a.total == b.total && a.thinking_length == b.thinking_length;
}

TEST(BatchTest, ParallelScoresEqualSerial) {
  const auto corpus = testing::make_labeled_corpus(21, 2000);
  std::vector<QARecord> records = corpus.records;
  std::vector<std::string> responses;
  for (auto& r : records) {
    r.target_length = 5;
    auto it = corpus.predictions.find(r.id);
    responses.push_back(it == corpus.predictions.end() ? "" : it->second);
  }
  for (OpenMetric metric : {OpenMetric::kMix, OpenMetric::kBleu}) {
    const RewardConfig config = RewardConfig::for_metric(metric);
    const auto parallel = score_responses(responses, records, config);
    const auto serial = score_responses_serial(responses, records, config);
    ASSERT_EQ(parallel.size(), serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      EXPECT_TRUE(same(parallel[i], serial[i])) << i;
    }
  }
  EXPECT_THROW(score_responses(std::span(responses).first(3), records, RewardConfig{}),
               UsageError);
}

TEST(BatchTest, ParallelVerdictsEqualSerial) {
  const auto corpus = testing::make_labeled_corpus(22, 2000);
  const auto parallel = score_records(corpus.records, corpus.predictions, RewardConfig{});
  const auto serial =
      score_records_serial(corpus.records, corpus.predictions, RewardConfig{});
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    const auto& a = parallel[i];
    const auto& b = serial[i];
    EXPECT_TRUE(a.missing == b.missing && a.format_ok == b.format_ok &&
                a.correct == b.correct && a.rouge == b.rouge && a.ems == b.ems)
        << i;
    EXPECT_EQ(a.missing, corpus.labels[i].missing);
    EXPECT_EQ(a.correct, corpus.labels[i].correct);
  }
  EXPECT_GE(parallel_threads(), 1);
}

}  // namespace
}  // namespace vreward
