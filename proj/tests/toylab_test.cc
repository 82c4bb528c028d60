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

#include "vreward/toylab.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "vreward/errors.h"
#include "vreward/respparse.h"

namespace vreward::toylab {
namespace {

std::vector<int> greedy_tokens(const ToyPolicy& policy, int feature, std::size_t max_len) {
  std::vector<int> tokens;
  int prev = kBosContext;
  for (std::size_t t = 0; t < max_len; ++t) {
    const auto lp = policy.next_log_probs(feature, prev, t);
    prev = static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    tokens.push_back(prev);
    if (prev == kEndTok) break;
  }
  return tokens;
}

TEST(GenTasksTest, DeterministicAndIdsSequential) {
  const KindMix mix{0.4, 0.3, 0.3};
  const auto a = gen_tasks(5, 50, mix);
  const auto b = gen_tasks(5, 50, mix);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].prompt_tokens, b[i].prompt_tokens);
    EXPECT_EQ(a[i].gold, b[i].gold);
  }
  EXPECT_EQ(a.front().id, "toy-000001");
  EXPECT_EQ(a.back().id, "toy-000050");
  const auto c = gen_tasks(6, 50, mix);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].prompt_tokens != c[i].prompt_tokens;
  EXPECT_TRUE(differs);
}

TEST(GenTasksTest, KindMixFollowed) {
  const auto tasks = gen_tasks(1, 4000, KindMix{0.5, 0.25, 0.25});
  std::map<TaskKind, int> counts;
  for (const auto& t : tasks) ++counts[t.kind];
  EXPECT_NEAR(counts[TaskKind::kMultipleChoice] / 4000.0, 0.5, 0.03);
  EXPECT_NEAR(counts[TaskKind::kNumeric] / 4000.0, 0.25, 0.03);
  EXPECT_NEAR(counts[TaskKind::kOpenText] / 4000.0, 0.25, 0.03);
  for (const auto& t : gen_tasks(1, 100, KindMix{0, 1, 0})) EXPECT_EQ(t.kind, TaskKind::kNumeric);
  EXPECT_THROW(gen_tasks(1, 1, KindMix{0.5, 0.5, 0.5}), ValidationError);
  EXPECT_THROW(gen_tasks(1, 1, KindMix{}, 0), ValidationError);
}

TEST(GenTasksTest, GoldIsRecomputableFromPrompt) {
  for (const auto& task : gen_tasks(3, 600, KindMix{0.4, 0.3, 0.3}, 24)) {
    EXPECT_EQ(task.target_length, 24);
    const QARecord record = task.to_record();
    EXPECT_NO_THROW(record.validate());
    EXPECT_EQ(record.kind(), task.kind);
    const auto& p = task.prompt_tokens;
    switch (task.kind) {
      case TaskKind::kMultipleChoice: {
        ASSERT_EQ(p.size(), 7u);
        std::map<std::string, int> counts;
        for (const auto& t : p) ++counts[t];
        int best = 0, ties = 0;
        std::string winner;
        for (const auto& [letter, n] : counts) {
          if (n > best) { best = n; ties = 1; winner = letter; }
          else if (n == best) ++ties;
        }
        EXPECT_EQ(ties, 1);
        EXPECT_EQ(task.gold, GoldAnswer::option_label(winner[0]));
        EXPECT_EQ(prompt_feature(task), winner[0] - 'A');
        EXPECT_EQ(record.source, "toy-mcq");
        break;
      }
      case TaskKind::kNumeric: {
        ASSERT_EQ(p.size(), 12u);
        EXPECT_EQ(p[0], "count");
        EXPECT_EQ(p[2], ":");
        int n = 0;
        for (std::size_t k = 3; k < p.size(); ++k) n += p[k] == p[1];
        EXPECT_EQ(task.gold, GoldAnswer::numeric_range(n - 1, n + 1));
        EXPECT_EQ(prompt_feature(task), kMcqFeatures + std::min(n, kNumericFeatures - 1));
        break;
      }
      case TaskKind::kOpenText: {
        EXPECT_EQ(p.back(), ".");
        const auto feature = prompt_feature(task);
        EXPECT_GE(feature, kMcqFeatures + kNumericFeatures);
        EXPECT_LT(feature, kFeatureCount);
        const auto phrase = phrases()[feature - kMcqFeatures - kNumericFeatures];
        EXPECT_EQ(task.gold, GoldAnswer::reference_text(std::string(phrase)));
        break;
      }
    }
  }
}

TEST(ToyPolicyTest, DistributionsNormalized) {
  ToyPolicy policy(4.0, 0.7);
  std::mt19937 rng(2);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (double& p : policy.parameters()) p += noise(rng);
  for (int f = 0; f < kFeatureCount; f += 3) {
    for (int prev = 0; prev < kContextCount; ++prev) {
      for (std::size_t t : {0u, 5u, 63u, 500u}) {
        const auto lp = policy.next_log_probs(f, prev, t);
        double sum = 0.0;
        for (double x : lp) sum += std::exp(x);
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
  }
}

TEST(ToyPolicyTest, InitialGreedyDecodeIsWellFormed) {
  const ToyPolicy policy;
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto tokens = greedy_tokens(policy, f, 64);
    ASSERT_EQ(tokens.back(), kEndTok);
    EXPECT_TRUE(parse_response(render(tokens)).format_ok) << render(tokens);
  }
}

TEST(ToyPolicyTest, ReferenceIsFrozen) {
  ToyPolicy policy;
  const std::vector<int> tokens = {kThinkOpenTok, kFirstFillerTok, kThinkCloseTok};
  const double before = policy.reference_log_prob(0, tokens);
  EXPECT_EQ(policy.log_prob(0, tokens), before);
  policy.parameters()[ToyPolicy::context_index(0, kThinkOpenTok, kFirstFillerTok)] += 1.0;
  EXPECT_EQ(policy.reference_log_prob(0, tokens), before);
  EXPECT_GT(policy.log_prob(0, tokens), before);
  policy.freeze_reference();
  EXPECT_EQ(policy.reference_log_prob(0, tokens), policy.log_prob(0, tokens));
}

TEST(SampleOutputTest, LogProbMatchesRecompute) {
  ToyPolicy policy(2.0, 1.3);
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(9, s);
    const int feature = static_cast<int>(s % kFeatureCount);
    const Sample sample = sample_output(policy, feature, 16, rng);
    EXPECT_LE(sample.tokens.size(), 16u);
    EXPECT_EQ(sample.step_log_probs.size(), sample.tokens.size());
    EXPECT_NEAR(sample.log_prob, policy.log_prob(feature, sample.tokens), 1e-10);
  }
  Rng rng(1);
  EXPECT_THROW(sample_output(policy, 0, 7, rng), UsageError);
}

TEST(SampleOutputTest, MaxLenTruncatesWithoutEnd) {
  // No template prior: stopping early within 8 tokens is rare.
  const ToyPolicy policy(0.0);
  int truncated = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(4, s);
    const Sample sample = sample_output(policy, 0, 8, rng);
    ASSERT_LE(sample.tokens.size(), 8u);
    if (sample.tokens.size() == 8 && sample.tokens.back() != kEndTok) ++truncated;
  }
  EXPECT_GT(truncated, 50);
}

TEST(ToyPolicyTest, GradientMatchesFiniteDifferences) {
  ToyPolicy policy(1.0, 0.8);
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (double& p : policy.parameters()) p += noise(rng);
  Rng sampler(17);
  const Sample sample = sample_output(policy, 5, 20, sampler);
  std::vector<double> grad(ToyPolicy::parameter_count(), 0.0);
  policy.accumulate_log_prob_gradient(5, sample.tokens, 1.0, grad);
  std::set<std::size_t> touched;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    if (grad[k] != 0.0) touched.insert(k);
  }
  ASSERT_FALSE(touched.empty());
  // Every context/position row the sequence visits must be checked.
  int prev = kBosContext;
  for (std::size_t t = 0; t < sample.tokens.size(); ++t) {
    for (int v = 0; v < kVocabSize; ++v) {
      touched.insert(ToyPolicy::context_index(5, prev, v));
      touched.insert(ToyPolicy::position_index(position_bucket(t), v));
    }
    prev = sample.tokens[t];
  }
  auto params = policy.parameters();
  const double h = 1e-5;
  for (std::size_t k : touched) {
    const double saved = params[k];
    params[k] = saved + h;
    const double up = policy.log_prob(5, sample.tokens);
    params[k] = saved - h;
    const double down = policy.log_prob(5, sample.tokens);
    params[k] = saved;
    EXPECT_NEAR(grad[k], (up - down) / (2 * h), 1e-6) << "parameter " << k;
  }
}

TEST(PositionBucketTest, Saturates) {
  EXPECT_EQ(position_bucket(0), 0);
  EXPECT_EQ(position_bucket(3), 0);
  EXPECT_EQ(position_bucket(4), 1);
  EXPECT_EQ(position_bucket(63), 15);
  EXPECT_EQ(position_bucket(10000), 15);
}

TEST(RenderTest, StopsAtEnd) {
  const std::vector<int> tokens = {kThinkOpenTok, kFirstFillerTok, kThinkCloseTok,
                                   kAnswerOpenTok, kFirstLetterTok + 2, kAnswerCloseTok,
                                   kEndTok, kFirstDigitTok};
  EXPECT_EQ(render(tokens), "<think> first </think> <answer> C </answer>");
  EXPECT_THROW(token_text(kVocabSize), UsageError);
}

TEST(RngTest, StreamsIndependentAndUniformInRange) {
  Rng a(1, 2, 3), b(1, 2, 3), c(1, 2, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs |= x != c.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    EXPECT_LT(a.below(7), 7u);
    b.below(7);
    c.below(7);
  }
  EXPECT_TRUE(differs);
}

TEST(TrainTest, ZeroStepsEmptyTrace) {
  const auto tasks = gen_tasks(1, 4, KindMix{});
  TrainOptions options;
  options.steps = 0;
  const auto result = train(tasks, RewardConfig{}, toy_grpo_defaults(), options);
  EXPECT_TRUE(result.trace.empty());
  const ToyPolicy fresh;
  EXPECT_TRUE(std::equal(fresh.parameters().begin(), fresh.parameters().end(),
                         result.policy.parameters().begin()));
  EXPECT_EQ(summarize(result.trace, 200).steps, 0);
}

TEST(TrainTest, BitIdenticalReruns) {
  const auto tasks = gen_tasks(2, 16, KindMix{0.4, 0.3, 0.3}, 12);
  TrainOptions options;
  options.steps = 150;
  options.seed = 77;
  const auto a = train(tasks, RewardConfig{}, toy_grpo_defaults(), options);
  const auto b = train(tasks, RewardConfig{}, toy_grpo_defaults(), options);
  ASSERT_EQ(a.trace.size(), 150u);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_TRUE(std::equal(a.policy.parameters().begin(), a.policy.parameters().end(),
                         b.policy.parameters().begin()));
  options.seed = 78;
  const auto c = train(tasks, RewardConfig{}, toy_grpo_defaults(), options);
  EXPECT_NE(a.trace, c.trace);
}

TEST(TrainTest, ConstantRewardWithoutKlLeavesPolicy) {
  // A metric can never exceed tau = 100, and the huge prior keeps every sample
  // well-formed, so every group is degenerate at total 0.
  auto tasks = gen_tasks(3, 4, KindMix{0, 0, 1});
  RewardConfig reward;
  reward.open_metric = OpenMetric::kRougeL;
  reward.tau = 100.0;
  reward.length_enabled = false;
  GrpoConfig grpo = toy_grpo_defaults();
  grpo.kl_beta = 0.0;
  TrainOptions options;
  options.steps = 20;
  options.template_bias = 60.0;
  const auto result = train(tasks, reward, grpo, options);
  for (const auto& r : result.trace) {
    EXPECT_EQ(r.format_compliance, 1.0);
  }
  const ToyPolicy fresh(60.0);
  EXPECT_TRUE(std::equal(fresh.parameters().begin(), fresh.parameters().end(),
                         result.policy.parameters().begin()));
}

TEST(TrailingMeanTest, WindowAndSummary) {
  std::vector<TraceRecord> trace;
  for (long long s = 1; s <= 10; ++s) {
    trace.push_back({s, static_cast<double>(s), std::nullopt, s <= 5 ? 0.0 : 1.0, 4.0});
  }
  const auto tail = trailing_mean(trace, 10, 4);
  EXPECT_DOUBLE_EQ(tail.mean_reward, 8.5);
  EXPECT_DOUBLE_EQ(tail.format_compliance, 1.0);
  EXPECT_FALSE(tail.mean_length_deviation.has_value());
  const auto summary = summarize(trace, 4);
  EXPECT_EQ(summary.steps, 10);
  EXPECT_EQ(summary.to_line(),
            R"({"record":"summary","steps":10,"format_compliance":1.0000,)"
            R"("mean_reward":8.5000,"mean_length_deviation":null})");
}

}  // namespace
}  // namespace vreward::toylab
