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

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "vreward/errors.h"
#include "vreward/jsonl.h"

namespace vreward::toylab {
namespace {

constexpr std::array<std::string_view, kVocabSize> kTokenText = {
    "<think>", "</think>", "<answer>", "</answer>", "<end>",
    "A", "B", "C", "D",
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
    "first", "then", "check", "so",
    "rest", "fluids", "oral", "iron", "daily", "twice", "weeks",
};

constexpr std::array<std::string_view, 6> kPhrases = {
    "oral iron daily", "rest fluids", "iron twice daily",
    "rest weeks",      "oral fluids", "twice daily",
};

constexpr std::array<std::string_view, 3> kMarkers = {"x", "y", "z"};
constexpr std::array<std::string_view, 3> kNoise = {"pt", "hx", "dx"};
constexpr std::size_t kMcqPromptLength = 7;
constexpr std::size_t kNumericSequenceLength = 9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool is_letter(int t) { return t >= kFirstLetterTok && t < kFirstDigitTok; }
bool is_digit(int t) { return t >= kFirstDigitTok && t < kFirstFillerTok; }
bool is_filler(int t) { return t >= kFirstFillerTok && t < kFirstPhraseTok; }
bool is_phrase(int t) { return t >= kFirstPhraseTok && t < kVocabSize; }
bool is_content(int t) { return is_letter(t) || is_digit(t) || is_phrase(t); }

// Grammar transitions that receive the template prior.
bool template_transition(int prev, int next) {
  if (prev == kBosContext) return next == kThinkOpenTok;
  if (prev == kThinkOpenTok) return is_filler(next);
  if (is_filler(prev)) return is_filler(next) || next == kThinkCloseTok;
  if (prev == kThinkCloseTok) return next == kAnswerOpenTok;
  if (prev == kAnswerOpenTok) return is_content(next);
  if (is_letter(prev) || is_digit(prev)) return next == kAnswerCloseTok;
  if (is_phrase(prev)) return is_phrase(next) || next == kAnswerCloseTok;
  if (prev == kAnswerCloseTok) return next == kEndTok;
  return false;
}

std::string make_id(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "toy-" + digits;
}

ToyTask make_mcq(Rng& rng) {
  ToyTask task;
  task.kind = TaskKind::kMultipleChoice;
  std::array<int, 4> counts{};
  for (;;) {
    task.prompt_tokens.clear();
    counts.fill(0);
    for (std::size_t i = 0; i < kMcqPromptLength; ++i) {
      const std::size_t letter = rng.below(4);
      ++counts[letter];
      task.prompt_tokens.emplace_back(kTokenText[kFirstLetterTok + letter]);
    }
    const int best = *std::max_element(counts.begin(), counts.end());
    if (std::count(counts.begin(), counts.end(), best) == 1) break;
  }
  const auto winner = std::max_element(counts.begin(), counts.end()) - counts.begin();
  task.gold = GoldAnswer::option_label(static_cast<char>('A' + winner));
  return task;
}

ToyTask make_numeric(Rng& rng) {
  ToyTask task;
  task.kind = TaskKind::kNumeric;
  const std::string_view marker = kMarkers[rng.below(kMarkers.size())];
  task.prompt_tokens = {"count", std::string(marker), ":"};
  int count = 0;
  for (std::size_t i = 0; i < kNumericSequenceLength; ++i) {
    const std::string_view symbol = kMarkers[rng.below(kMarkers.size())];
    if (symbol == marker) ++count;
    task.prompt_tokens.emplace_back(symbol);
  }
  task.gold = GoldAnswer::numeric_range(count - 1, count + 1);
  return task;
}

ToyTask make_open(Rng& rng) {
  ToyTask task;
  task.kind = TaskKind::kOpenText;
  const std::size_t noise = rng.below(3);
  for (std::size_t i = 0; i < noise; ++i) {
    task.prompt_tokens.emplace_back(kNoise[rng.below(kNoise.size())]);
  }
  const std::string_view phrase = kPhrases[rng.below(kPhrases.size())];
  task.prompt_tokens.emplace_back("repeat");
  task.prompt_tokens.emplace_back(":");
  std::size_t begin = 0;
  while (begin < phrase.size()) {
    std::size_t end = phrase.find(' ', begin);
    if (end == std::string_view::npos) end = phrase.size();
    task.prompt_tokens.emplace_back(phrase.substr(begin, end - begin));
    begin = end + 1;
  }
  task.prompt_tokens.emplace_back(".");
  task.gold = GoldAnswer::reference_text(std::string(phrase));
  return task;
}

}  // namespace

std::string_view token_text(int token) {
  if (token < 0 || token >= kVocabSize) throw UsageError("token out of range");
  return kTokenText[static_cast<std::size_t>(token)];
}

std::string render(std::span<const int> tokens) {
  std::string text;
  for (int t : tokens) {
    if (t == kEndTok) break;
    if (!text.empty()) text += ' ';
    text += token_text(t);
  }
  return text;
}

std::span<const std::string_view> phrases() { return kPhrases; }

Rng::Rng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ stream_a);
  s = splitmix64(s ^ (stream_b * 0xD1B54A32D192ED03ULL));
  engine_.seed(s);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw UsageError("Rng::below(0)");
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

QARecord ToyTask::to_record() const {
  QARecord record;
  record.id = id;
  std::string question;
  for (const auto& t : prompt_tokens) {
    if (!question.empty()) question += ' ';
    question += t;
  }
  record.question = std::move(question);
  record.gold = gold;
  record.target_length = target_length;
  record.source = "toy-" + std::string(to_string(kind));
  return record;
}

void KindMix::validate() const {
  if (mcq < 0.0 || numeric < 0.0 || open < 0.0) {
    throw ValidationError("kind mix proportions must be non-negative");
  }
  if (std::abs(mcq + numeric + open - 1.0) > 1e-9) {
    throw ValidationError("kind mix proportions must sum to 1");
  }
}

std::vector<ToyTask> gen_tasks(std::uint64_t seed, std::size_t count,
                               const KindMix& mix,
                               std::optional<int> target_length) {
  mix.validate();
  if (target_length && *target_length <= 0) {
    throw ValidationError("target_length must be positive");
  }
  std::vector<ToyTask> tasks;
  tasks.reserve(count);
  Rng rng(seed, 0x7461736BULL);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform();
    ToyTask task;
    if (u < mix.mcq) {
      task = make_mcq(rng);
    } else if (u < mix.mcq + mix.numeric) {
      task = make_numeric(rng);
    } else {
      task = make_open(rng);
    }
    task.id = make_id(i + 1);
    task.target_length = target_length;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

int prompt_feature(const ToyTask& task) {
  const auto& tokens = task.prompt_tokens;
  switch (task.kind) {
    case TaskKind::kMultipleChoice: {
      std::array<int, 4> counts{};
      for (const auto& t : tokens) {
        if (t.size() == 1 && t[0] >= 'A' && t[0] <= 'D') ++counts[t[0] - 'A'];
      }
      return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                              counts.begin());
    }
    case TaskKind::kNumeric: {
      if (tokens.size() < 3) throw UsageError("numeric toy prompt too short");
      const auto count =
          std::count(tokens.begin() + 3, tokens.end(), tokens[1]);
      return kMcqFeatures +
             static_cast<int>(std::min<std::ptrdiff_t>(count, kNumericFeatures - 1));
    }
    case TaskKind::kOpenText: {
      auto it = std::find(tokens.begin(), tokens.end(), "repeat");
      std::string phrase;
      if (it != tokens.end()) it += 2;
      for (; it < tokens.end() && *it != "."; ++it) {
        if (!phrase.empty()) phrase += ' ';
        phrase += *it;
      }
      for (std::size_t k = 0; k < kPhrases.size(); ++k) {
        if (kPhrases[k] == phrase) {
          return kMcqFeatures + kNumericFeatures + static_cast<int>(k);
        }
      }
      throw UsageError("open toy prompt does not embed a known phrase");
    }
  }
  return 0;
}

int position_bucket(std::size_t position) {
  return static_cast<int>(
      std::min<std::size_t>(position / kPositionBucketWidth, kPositionBuckets - 1));
}

ToyPolicy::ToyPolicy(double template_bias, double temperature)
    : params_(parameter_count(), 0.0), temperature_(1.0) {
  set_temperature(temperature);
  for (int f = 0; f < kFeatureCount; ++f) {
    for (int prev = 0; prev < kContextCount; ++prev) {
      for (int v = 0; v < kVocabSize; ++v) {
        if (template_transition(prev, v)) {
          params_[context_index(f, prev, v)] = template_bias;
        }
      }
    }
  }
  reference_ = params_;
}

void ToyPolicy::set_temperature(double t) {
  if (!(t > 0.0)) throw UsageError("temperature must be positive");
  temperature_ = t;
}

void ToyPolicy::freeze_reference() { reference_ = params_; }

std::size_t ToyPolicy::context_index(int feature, int prev, int token) {
  return (static_cast<std::size_t>(feature) * kContextCount +
          static_cast<std::size_t>(prev)) * kVocabSize +
         static_cast<std::size_t>(token);
}

std::size_t ToyPolicy::position_index(int bucket, int token) {
  return static_cast<std::size_t>(kFeatureCount) * kContextCount * kVocabSize +
         static_cast<std::size_t>(bucket) * kVocabSize +
         static_cast<std::size_t>(token);
}

void ToyPolicy::fill_log_probs(std::span<const double> params, int feature,
                               int prev, std::size_t position,
                               std::span<double> out) const {
  if (feature < 0 || feature >= kFeatureCount) {
    throw UsageError("prompt feature out of range");
  }
  const int bucket = position_bucket(position);
  double max_logit = -INFINITY;
  for (int v = 0; v < kVocabSize; ++v) {
    out[v] = (params[context_index(feature, prev, v)] +
              params[position_index(bucket, v)]) / temperature_;
    max_logit = std::max(max_logit, out[v]);
  }
  double z = 0.0;
  for (int v = 0; v < kVocabSize; ++v) z += std::exp(out[v] - max_logit);
  const double log_z = max_logit + std::log(z);
  for (int v = 0; v < kVocabSize; ++v) out[v] -= log_z;
}

std::vector<double> ToyPolicy::next_log_probs(int feature, int prev,
                                              std::size_t position) const {
  std::vector<double> out(kVocabSize);
  fill_log_probs(params_, feature, prev, position, out);
  return out;
}

double ToyPolicy::sequence_log_prob(std::span<const double> params, int feature,
                                    std::span<const int> tokens) const {
  std::array<double, kVocabSize> lp{};
  double total = 0.0;
  int prev = kBosContext;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    fill_log_probs(params, feature, prev, t, lp);
    total += lp[static_cast<std::size_t>(tokens[t])];
    prev = tokens[t];
  }
  return total;
}

double ToyPolicy::log_prob(int feature, std::span<const int> tokens) const {
  return sequence_log_prob(params_, feature, tokens);
}

double ToyPolicy::reference_log_prob(int feature,
                                     std::span<const int> tokens) const {
  return sequence_log_prob(reference_, feature, tokens);
}

void ToyPolicy::accumulate_log_prob_gradient(int feature,
                                             std::span<const int> tokens,
                                             double weight,
                                             std::span<double> gradient) const {
  if (gradient.size() != params_.size()) {
    throw UsageError("gradient buffer does not match parameter count");
  }
  std::array<double, kVocabSize> lp{};
  const double scale = weight / temperature_;
  int prev = kBosContext;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    fill_log_probs(params_, feature, prev, t, lp);
    const int bucket = position_bucket(t);
    for (int v = 0; v < kVocabSize; ++v) {
      const double g = scale * ((v == tokens[t] ? 1.0 : 0.0) - std::exp(lp[v]));
      gradient[context_index(feature, prev, v)] += g;
      gradient[position_index(bucket, v)] += g;
    }
    prev = tokens[t];
  }
}

Sample sample_output(const ToyPolicy& policy, int feature, std::size_t max_len,
                     Rng& rng) {
  if (max_len < 8) throw UsageError("max_len must be at least 8");
  Sample sample;
  int prev = kBosContext;
  for (std::size_t t = 0; t < max_len; ++t) {
    const std::vector<double> lp = policy.next_log_probs(feature, prev, t);
    const double u = rng.uniform();
    double cumulative = 0.0;
    int chosen = kVocabSize - 1;
    for (int v = 0; v < kVocabSize; ++v) {
      cumulative += std::exp(lp[v]);
      if (u < cumulative) {
        chosen = v;
        break;
      }
    }
    sample.tokens.push_back(chosen);
    sample.step_log_probs.push_back(lp[chosen]);
    sample.log_prob += lp[chosen];
    prev = chosen;
    if (chosen == kEndTok) break;
  }
  return sample;
}

GrpoConfig toy_grpo_defaults() {
  GrpoConfig config;
  config.learning_rate = 0.5;
  config.max_grad_norm = 1.0;
  return config;
}

TrainResult train(std::span<const ToyTask> tasks, const RewardConfig& reward_config,
                  const GrpoConfig& grpo_config, const TrainOptions& options) {
  if (tasks.empty()) throw UsageError("train: no tasks");
  if (options.max_len < 8) throw UsageError("max_len must be at least 8");
  reward_config.validate();
  grpo_config.validate();

  TrainResult result{{}, ToyPolicy(options.template_bias, grpo_config.temperature), 0};
  ToyPolicy& policy = result.policy;

  std::vector<QARecord> records;
  std::vector<int> features;
  for (const ToyTask& task : tasks) {
    records.push_back(task.to_record());
    features.push_back(prompt_feature(task));
  }

  const auto group_size = static_cast<std::size_t>(grpo_config.group_size);
  std::vector<Sample> samples(group_size);
  std::vector<RewardBreakdown> breakdowns(group_size);
  std::vector<double> ref_logprobs(group_size);

  for (long long step = 1; step <= options.steps; ++step) {
    Rng task_rng(options.seed, static_cast<std::uint64_t>(step), 0);
    const std::size_t index = task_rng.below(tasks.size());
    const QARecord& record = records[index];
    const int feature = features[index];

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(group_size); ++i) {
      Rng rng(options.seed, static_cast<std::uint64_t>(step),
              static_cast<std::uint64_t>(i) + 1);
      samples[i] = sample_output(policy, feature, options.max_len, rng);
      breakdowns[i] = total_reward(render(samples[i].tokens), record, reward_config);
      ref_logprobs[i] = policy.reference_log_prob(feature, samples[i].tokens);
    }

    RolloutGroup group;
    group.question_id = record.id;
    group.prompt_feature = feature;
    double compliant = 0.0;
    double deviation = 0.0;
    double response_length = 0.0;
    for (std::size_t i = 0; i < group_size; ++i) {
      group.outputs.push_back(samples[i].tokens);
      group.rewards.push_back(breakdowns[i].total);
      group.old_logprobs.push_back(samples[i].log_prob);
      group.ref_logprobs.push_back(ref_logprobs[i]);
      if (breakdowns[i].r_format > 0) compliant += 1.0;
      if (record.target_length) {
        deviation += std::abs(static_cast<double>(breakdowns[i].thinking_length) -
                              *record.target_length);
      }
      const auto& tokens = samples[i].tokens;
      response_length += static_cast<double>(
          std::count_if(tokens.begin(), tokens.end(), [](int t) { return t != kEndTok; }));
    }
    group.advantages = group_advantages(group.rewards, grpo_config.std_floor);

    const StepReport report =
        policy_step(policy, std::span<const RolloutGroup>(&group, 1), grpo_config);
    if (!report.accepted) ++result.rejected_steps;

    const double g = static_cast<double>(group_size);
    TraceRecord trace;
    trace.step = step;
    trace.mean_reward = std::accumulate(group.rewards.begin(), group.rewards.end(), 0.0) / g;
    if (record.target_length) trace.mean_length_deviation = deviation / g;
    trace.format_compliance = compliant / g;
    trace.mean_response_length = response_length / g;
    result.trace.push_back(trace);
  }
  return result;
}

TraceRecord trailing_mean(std::span<const TraceRecord> trace, long long end,
                          std::size_t window) {
  TraceRecord mean;
  mean.step = end;
  double n = 0.0;
  double deviation_n = 0.0;
  double deviation = 0.0;
  for (const TraceRecord& r : trace) {
    if (r.step > end || r.step <= end - static_cast<long long>(window)) continue;
    n += 1.0;
    mean.mean_reward += r.mean_reward;
    mean.format_compliance += r.format_compliance;
    mean.mean_response_length += r.mean_response_length;
    if (r.mean_length_deviation) {
      deviation += *r.mean_length_deviation;
      deviation_n += 1.0;
    }
  }
  if (n > 0.0) {
    mean.mean_reward /= n;
    mean.format_compliance /= n;
    mean.mean_response_length /= n;
  }
  if (deviation_n > 0.0) mean.mean_length_deviation = deviation / deviation_n;
  return mean;
}

TrainSummary summarize(std::span<const TraceRecord> trace, std::size_t window) {
  TrainSummary summary;
  if (trace.empty()) return summary;
  summary.steps = trace.back().step;
  const TraceRecord tail = trailing_mean(trace, summary.steps, window);
  summary.format_compliance = tail.format_compliance;
  summary.mean_reward = tail.mean_reward;
  summary.mean_length_deviation = tail.mean_length_deviation;
  return summary;
}

std::string TrainSummary::to_line() const {
  return JsonLine()
      .add("record", "summary")
      .add("steps", steps)
      .add("format_compliance", format_compliance)
      .add("mean_reward", mean_reward)
      .add_optional("mean_length_deviation", mean_length_deviation)
      .str();
}

}  // namespace vreward::toylab
