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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vreward/grpo.h"
#include "vreward/record.h"
#include "vreward/reward.h"

namespace vreward::toylab {

// ---------------------------------------------------------------------------
// Vocabulary. Tag tokens are atomic symbols; rendering joins token strings
// with single spaces so the tag parser sees ordinary text.

enum Token : int {
  kThinkOpenTok = 0,
  kThinkCloseTok,
  kAnswerOpenTok,
  kAnswerCloseTok,
  kEndTok,
  kFirstLetterTok,                        // A B C D
  kFirstDigitTok = kFirstLetterTok + 4,   // 0 .. 9
  kFirstFillerTok = kFirstDigitTok + 10,  // reasoning filler words
  kFirstPhraseTok = kFirstFillerTok + 4,  // open-text phrase words
  kVocabSize = kFirstPhraseTok + 7,
};

// Context id for the first generated token.
inline constexpr int kBosContext = kVocabSize;
inline constexpr int kContextCount = kVocabSize + 1;

std::string_view token_text(int token);
// Renders tokens up to (not including) the first end token.
std::string render(std::span<const int> tokens);

// Phrases used by open-text tasks.
std::span<const std::string_view> phrases();

// ---------------------------------------------------------------------------
// Deterministic randomness. All stochasticity flows through Rng, a
// std::mt19937_64 whose output sequence is fixed by the C++ standard. Streams
// are keyed by (seed, a, b) through SplitMix64 so parallel sampling draws the
// same numbers as serial sampling.

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_a = 0, std::uint64_t stream_b = 0);

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Tasks.

inline constexpr int kMcqFeatures = 4;
inline constexpr int kNumericFeatures = 10;
inline constexpr int kFeatureCount = kMcqFeatures + kNumericFeatures + 6;

struct ToyTask {
  std::string id;
  std::vector<std::string> prompt_tokens;
  TaskKind kind = TaskKind::kMultipleChoice;
  GoldAnswer gold;
  std::optional<int> target_length;

  QARecord to_record() const;
};

struct KindMix {
  double mcq = 1.0;
  double numeric = 0.0;
  double open = 0.0;

  // Throws ValidationError unless all parts are non-negative and sum to 1.
  void validate() const;
};

// MCQ prompts list option letters and ask for the most frequent one.
// Numeric prompts mark a symbol and ask for its count (gold range +-1).
// Open-text prompts embed a phrase to be reproduced.
std::vector<ToyTask> gen_tasks(std::uint64_t seed, std::size_t count,
                               const KindMix& mix,
                               std::optional<int> target_length = std::nullopt);

// Coarse prompt summary the policy conditions on: the majority letter for
// MCQ, the marked-symbol count for numeric, the phrase index for open text.
int prompt_feature(const ToyTask& task);

// ---------------------------------------------------------------------------
// Policy.

inline constexpr int kPositionBuckets = 16;
inline constexpr int kPositionBucketWidth = 4;

int position_bucket(std::size_t position);

// Log-linear next-token model. The logit of token v after `prev` at
// position t for prompt feature f is
//   context[f][prev][v] + position[bucket(t)][v],
// scaled by 1/temperature. Initial parameters carry a template prior: each
// transition of the think/answer grammar gets +template_bias. The reference
// parameters are a frozen copy of the initial ones.
class ToyPolicy final : public SequencePolicy {
 public:
  explicit ToyPolicy(double template_bias = 4.0, double temperature = 1.0);

  std::span<double> parameters() override { return params_; }
  std::span<const double> parameters() const override { return params_; }
  std::span<const double> reference_parameters() const { return reference_; }

  double temperature() const { return temperature_; }
  void set_temperature(double t);

  // Next-token log-probabilities for the given context.
  std::vector<double> next_log_probs(int feature, int prev,
                                     std::size_t position) const;

  double log_prob(int feature, std::span<const int> tokens) const override;
  double reference_log_prob(int feature,
                            std::span<const int> tokens) const override;
  void accumulate_log_prob_gradient(int feature, std::span<const int> tokens,
                                    double weight,
                                    std::span<double> gradient) const override;

  // Offsets into parameters() for the two tables.
  static std::size_t context_index(int feature, int prev, int token);
  static std::size_t position_index(int bucket, int token);
  static constexpr std::size_t parameter_count() {
    return static_cast<std::size_t>(kFeatureCount) * kContextCount * kVocabSize +
           static_cast<std::size_t>(kPositionBuckets) * kVocabSize;
  }

  // Overwrites the frozen reference with the current parameters.
  void freeze_reference();

 private:
  double sequence_log_prob(std::span<const double> params, int feature,
                           std::span<const int> tokens) const;
  void fill_log_probs(std::span<const double> params, int feature, int prev,
                      std::size_t position, std::span<double> out) const;

  std::vector<double> params_;
  std::vector<double> reference_;
  double temperature_;
};

struct Sample {
  std::vector<int> tokens;
  std::vector<double> step_log_probs;
  double log_prob = 0.0;
};

// Autoregressive categorical sampling, stopping after an end token or at
// max_len tokens. Throws UsageError when max_len < 8.
Sample sample_output(const ToyPolicy& policy, int feature, std::size_t max_len,
                     Rng& rng);

// ---------------------------------------------------------------------------
// Training.

struct TrainOptions {
  long long steps = 5000;
  std::uint64_t seed = 0;
  std::size_t max_len = 64;
  double template_bias = 4.0;
  // Trace aggregates: trailing windows are measured in steps.
  std::size_t trailing_window = 200;
};

// Learning rate and gradient clip used by the toy trainer in place of the
// LLM-scale defaults in GrpoConfig.
GrpoConfig toy_grpo_defaults();

struct TrainResult {
  std::vector<TraceRecord> trace;
  ToyPolicy policy;
  long long rejected_steps = 0;
};

// One task per step (drawn uniformly by the run's generator), G samples,
// rewards from total_reward, group advantages, one policy_step. Group
// sampling runs in parallel when OpenMP is available; results are identical
// to the serial path.
TrainResult train(std::span<const ToyTask> tasks, const RewardConfig& reward_config,
                  const GrpoConfig& grpo_config, const TrainOptions& options);

struct TrainSummary {
  long long steps = 0;
  double format_compliance = 0.0;
  double mean_reward = 0.0;
  std::optional<double> mean_length_deviation;

  std::string to_line() const;
};

// Mean of each field over trace records with end - window < step <= end.
TraceRecord trailing_mean(std::span<const TraceRecord> trace, long long end,
                          std::size_t window);

TrainSummary summarize(std::span<const TraceRecord> trace, std::size_t window);

}  // namespace vreward::toylab
