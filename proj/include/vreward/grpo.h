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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vreward {

// Defaults follow the reference training recipe: 8 rollouts per prompt,
// KL coefficient 0.001, learning rate 5e-7, temperature 1.0. The toy trainer
// overrides the learning rate (see toylab.h).
struct GrpoConfig {
  int group_size = 8;
  double clip_epsilon = 0.2;
  double kl_beta = 0.001;
  double learning_rate = 5e-7;
  double std_floor = 1e-6;
  double temperature = 1.0;
  // Global L2 clip applied to the update direction; <= 0 disables it.
  double max_grad_norm = 1.0;

  // Throws ValidationError on group_size < 2, epsilon outside (0, 1),
  // negative beta or non-positive learning rate, floor or temperature.
  void validate() const;
};

// G sampled outputs for one question with their rewards, advantages, and
// sequence log-probabilities under the sampling and reference policies.
struct RolloutGroup {
  std::string question_id;
  int prompt_feature = 0;
  std::vector<std::vector<int>> outputs;
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<double> old_logprobs;
  std::vector<double> ref_logprobs;

  std::size_t size() const { return outputs.size(); }
  // Throws UsageError when the per-output lists disagree in length.
  void validate() const;
};

// (r_i - mean) / (population std + floor). All zeros when the population
// std is below the floor. Throws UsageError for fewer than two rewards.
std::vector<double> group_advantages(std::span<const double> rewards,
                                     double std_floor);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double clipped_term(double ratio, double advantage, double epsilon);

// d clipped_term / d log pi_new, where ratio = exp(log pi_new - log pi_old).
double clipped_term_slope(double ratio, double advantage, double epsilon);

// exp(ref - new) - (ref - new) - 1; non-negative, zero iff new == ref.
double kl_penalty(double logp_new, double logp_ref);

// d kl_penalty / d logp_new.
double kl_penalty_slope(double logp_new, double logp_ref);

// Mean clipped surrogate over the group minus beta times the mean KL
// estimate. Throws UsageError when new_logprobs does not match the group.
double grpo_objective(const RolloutGroup& group,
                      std::span<const double> new_logprobs,
                      const GrpoConfig& config);

// Anything that assigns differentiable log-probabilities to its own
// sampled sequences can be optimized by policy_step.
class SequencePolicy {
 public:
  virtual ~SequencePolicy() = default;

  virtual std::span<double> parameters() = 0;
  virtual std::span<const double> parameters() const = 0;

  virtual double log_prob(int prompt_feature,
                          std::span<const int> tokens) const = 0;
  virtual double reference_log_prob(int prompt_feature,
                                    std::span<const int> tokens) const = 0;
  // gradient += weight * d log_prob / d parameters.
  virtual void accumulate_log_prob_gradient(int prompt_feature,
                                            std::span<const int> tokens,
                                            double weight,
                                            std::span<double> gradient) const = 0;
};

// Mean of grpo_objective across groups with new log-probabilities taken from
// the policy's current parameters.
double mean_objective(const SequencePolicy& policy,
                      std::span<const RolloutGroup> groups,
                      const GrpoConfig& config);

// Analytic gradient of mean_objective with respect to policy parameters.
std::vector<double> objective_gradient(const SequencePolicy& policy,
                                       std::span<const RolloutGroup> groups,
                                       const GrpoConfig& config);

struct StepReport {
  bool accepted = false;
  double objective = 0.0;
  double gradient_norm = 0.0;
  std::string diagnostic;
};

// One gradient-ascent step on mean_objective. A non-finite gradient leaves
// the parameters untouched and reports why. Callers serialize calls.
StepReport policy_step(SequencePolicy& policy,
                       std::span<const RolloutGroup> groups,
                       const GrpoConfig& config);

// Per-step training aggregates, one JSON object per line.
struct TraceRecord {
  long long step = 0;
  double mean_reward = 0.0;
  std::optional<double> mean_length_deviation;
  double format_compliance = 0.0;
  double mean_response_length = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

std::string to_trace_line(const TraceRecord& record);
// Throws ValidationError on a malformed line.
TraceRecord parse_trace_line(std::string_view line);

}  // namespace vreward
