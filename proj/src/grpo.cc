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

#include "vreward/grpo.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "vreward/errors.h"
#include "vreward/jsonl.h"

namespace vreward {

void GrpoConfig::validate() const {
  if (group_size < 2) throw ValidationError("group_size must be at least 2");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw ValidationError("clip_epsilon must lie in (0, 1)");
  }
  if (!(kl_beta >= 0.0)) throw ValidationError("kl_beta must be non-negative");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (!(std_floor > 0.0)) throw ValidationError("std_floor must be positive");
  if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
}

void RolloutGroup::validate() const {
  const std::size_t g = outputs.size();
  if (rewards.size() != g || advantages.size() != g ||
      old_logprobs.size() != g || ref_logprobs.size() != g) {
    throw UsageError("rollout group '" + question_id +
                     "' has per-output lists of different lengths");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards,
                                     double std_floor) {
  if (rewards.size() < 2) {
    throw UsageError("group_advantages needs at least two rewards");
  }
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double sq = 0.0;
  for (double r : rewards) sq += (r - mean) * (r - mean);
  const double stddev = std::sqrt(sq / n);

  std::vector<double> advantages(rewards.size(), 0.0);
  if (stddev < std_floor) return advantages;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    advantages[i] = (rewards[i] - mean) / (stddev + std_floor);
  }
  return advantages;
}

double clipped_term(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double clipped_term_slope(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  // The clipped branch is constant in the policy once it is the smaller one.
  // Written as a negated test so a NaN input stays NaN.
  return ratio * advantage > clipped * advantage ? 0.0 : ratio * advantage;
}

double kl_penalty(double logp_new, double logp_ref) {
  const double delta = logp_ref - logp_new;
  return std::exp(delta) - delta - 1.0;
}

double kl_penalty_slope(double logp_new, double logp_ref) {
  return 1.0 - std::exp(logp_ref - logp_new);
}

double grpo_objective(const RolloutGroup& group,
                      std::span<const double> new_logprobs,
                      const GrpoConfig& config) {
  group.validate();
  if (new_logprobs.size() != group.size()) {
    throw UsageError("grpo_objective: new_logprobs size does not match group");
  }
  if (group.size() == 0) throw UsageError("grpo_objective: empty group");
  double surrogate = 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double ratio = std::exp(new_logprobs[i] - group.old_logprobs[i]);
    surrogate += clipped_term(ratio, group.advantages[i], config.clip_epsilon);
    kl += kl_penalty(new_logprobs[i], group.ref_logprobs[i]);
  }
  const double g = static_cast<double>(group.size());
  return surrogate / g - config.kl_beta * kl / g;
}

double mean_objective(const SequencePolicy& policy,
                      std::span<const RolloutGroup> groups,
                      const GrpoConfig& config) {
  if (groups.empty()) throw UsageError("mean_objective: no rollout groups");
  double total = 0.0;
  std::vector<double> new_logprobs;
  for (const RolloutGroup& group : groups) {
    new_logprobs.clear();
    for (const auto& output : group.outputs) {
      new_logprobs.push_back(policy.log_prob(group.prompt_feature, output));
    }
    total += grpo_objective(group, new_logprobs, config);
  }
  return total / static_cast<double>(groups.size());
}

std::vector<double> objective_gradient(const SequencePolicy& policy,
                                       std::span<const RolloutGroup> groups,
                                       const GrpoConfig& config) {
  if (groups.empty()) throw UsageError("objective_gradient: no rollout groups");
  std::vector<double> gradient(policy.parameters().size(), 0.0);
  const double group_weight = 1.0 / static_cast<double>(groups.size());
  for (const RolloutGroup& group : groups) {
    group.validate();
    const double output_weight =
        group_weight / static_cast<double>(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
      const double logp = policy.log_prob(group.prompt_feature, group.outputs[i]);
      const double ratio = std::exp(logp - group.old_logprobs[i]);
      const double slope =
          clipped_term_slope(ratio, group.advantages[i], config.clip_epsilon) -
          config.kl_beta * kl_penalty_slope(logp, group.ref_logprobs[i]);
      if (slope == 0.0) continue;
      policy.accumulate_log_prob_gradient(group.prompt_feature, group.outputs[i],
                                          output_weight * slope, gradient);
    }
  }
  return gradient;
}

StepReport policy_step(SequencePolicy& policy,
                       std::span<const RolloutGroup> groups,
                       const GrpoConfig& config) {
  StepReport report;
  report.objective = mean_objective(policy, groups, config);
  std::vector<double> gradient = objective_gradient(policy, groups, config);

  double sq = 0.0;
  for (double g : gradient) sq += g * g;
  report.gradient_norm = std::sqrt(sq);
  if (!std::isfinite(report.gradient_norm)) {
    report.diagnostic = "non-finite gradient; step rejected";
    return report;
  }
  double scale = config.learning_rate;
  if (config.max_grad_norm > 0.0 && report.gradient_norm > config.max_grad_norm) {
    scale *= config.max_grad_norm / report.gradient_norm;
  }
  std::span<double> params = policy.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k] += scale * gradient[k];
  }
  report.accepted = true;
  return report;
}

std::string to_trace_line(const TraceRecord& record) {
  return JsonLine()
      .add("step", record.step)
      .add("mean_reward", record.mean_reward)
      .add_optional("mean_length_deviation", record.mean_length_deviation)
      .add("format_compliance", record.format_compliance)
      .add("mean_response_length", record.mean_response_length)
      .str();
}

TraceRecord parse_trace_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TraceRecord record;
    record.step = j.at("step").get<long long>();
    record.mean_reward = j.at("mean_reward").get<double>();
    if (!j.at("mean_length_deviation").is_null()) {
      record.mean_length_deviation = j.at("mean_length_deviation").get<double>();
    }
    record.format_compliance = j.at("format_compliance").get<double>();
    record.mean_response_length = j.at("mean_response_length").get<double>();
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed trace line: ") + e.what());
  }
}

}  // namespace vreward
