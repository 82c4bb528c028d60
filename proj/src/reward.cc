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

#include "vreward/reward.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "vreward/errors.h"
#include "vreward/jsonl.h"

namespace vreward {
namespace {

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v)) {
    throw ValidationError("config key '" + key + "': not a number: '" + value + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ValidationError("config key '" + key + "': not an integer: '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config key '" + key + "': expected true or false, got '" +
                        value + "'");
}

// Shortest representation that parses back to the same double.
std::string round_trip(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

double default_tau(OpenMetric metric) {
  switch (metric) {
    case OpenMetric::kRougeL: return 40.0;
    case OpenMetric::kEms: return 70.0;
    case OpenMetric::kMix: return 50.0;
    case OpenMetric::kBleu: return 50.0;
  }
  return 50.0;
}

RewardConfig RewardConfig::for_metric(OpenMetric metric) {
  RewardConfig config;
  config.open_metric = metric;
  config.tau = default_tau(metric);
  return config;
}

void RewardConfig::validate() const {
  if (alpha <= 0) throw ValidationError("alpha must be positive");
  if (!(tau >= 0.0 && tau <= 100.0)) {
    throw ValidationError("tau must lie in [0, 100]");
  }
}

double length_reward(long long thinking_length, long long target_length,
                     int alpha) {
  if (alpha <= 0) throw UsageError("length_reward: alpha must be positive");
  const double deviation =
      static_cast<double>(std::llabs(thinking_length - target_length));
  return std::clamp(1.0 - deviation / static_cast<double>(alpha), -1.0, 1.0);
}

CorrectnessResult correctness_reward(const ParsedResponse& parsed,
                                     const GoldAnswer& gold,
                                     const RewardConfig& config) {
  if (!parsed.format_ok) {
    throw UsageError("correctness_reward called on a malformed response");
  }
  const std::string& answer = *parsed.answer_span;
  CorrectnessResult result;
  switch (gold.kind) {
    case GoldKind::kOptionLabel:
      result.reward = verify_option(answer, gold) ? 1 : -1;
      break;
    case GoldKind::kNumericRange:
    case GoldKind::kLiteralValue:
      result.reward = verify_numeric(answer, gold) ? 1 : -1;
      break;
    case GoldKind::kReferenceText: {
      const MetricScore score = open_text_score(
          answer, *gold.reference, config.open_metric, config.ems_mode);
      result.raw_metric = score;
      result.reward = score.value() > config.tau ? 1 : -1;
      break;
    }
  }
  return result;
}

RewardBreakdown total_reward(std::string_view raw_text, const QARecord& record,
                             const RewardConfig& config) {
  const ParsedResponse parsed = parse_response(raw_text, config.length_unit);
  RewardBreakdown breakdown;
  breakdown.thinking_length = parsed.thinking_length;
  breakdown.r_format = format_reward(parsed);
  if (breakdown.r_format < 0) {
    breakdown.total = -1.0;
    return breakdown;
  }
  const CorrectnessResult correct =
      correctness_reward(parsed, record.gold, config);
  breakdown.r_correct = correct.reward;
  breakdown.raw_metric = correct.raw_metric;
  double total = breakdown.r_format + correct.reward;
  if (config.length_enabled && record.target_length) {
    breakdown.r_length =
        length_reward(static_cast<long long>(parsed.thinking_length),
                      *record.target_length, config.alpha);
    total += *breakdown.r_length;
  }
  breakdown.total = total;
  return breakdown;
}

std::map<std::string, std::string> to_key_values(const RewardConfig& config) {
  return {
      {"tau", round_trip(config.tau)},
      {"alpha", std::to_string(config.alpha)},
      {"open_metric", std::string(to_string(config.open_metric))},
      {"length_unit", std::string(to_string(config.length_unit))},
      {"length_enabled", config.length_enabled ? "true" : "false"},
      {"ems_mode", std::string(to_string(config.ems_mode))},
  };
}

RewardConfig apply_key_values(const std::map<std::string, std::string>& values,
                              RewardConfig base) {
  RewardConfig config = base;
  if (auto it = values.find("open_metric"); it != values.end()) {
    const auto metric = parse_open_metric(it->second);
    if (!metric) {
      throw ValidationError("config key 'open_metric': unknown metric '" +
                            it->second + "' (expected rouge|ems|mix|bleu)");
    }
    config.open_metric = *metric;
    config.tau = default_tau(*metric);
  }
  if (auto it = values.find("tau"); it != values.end()) {
    config.tau = parse_double("tau", it->second);
  }
  if (auto it = values.find("alpha"); it != values.end()) {
    config.alpha = parse_int("alpha", it->second);
  }
  if (auto it = values.find("length_unit"); it != values.end()) {
    const auto unit = parse_length_unit(it->second);
    if (!unit) {
      throw ValidationError("config key 'length_unit': expected words|chars, got '" +
                            it->second + "'");
    }
    config.length_unit = *unit;
  }
  if (auto it = values.find("length_enabled"); it != values.end()) {
    config.length_enabled = parse_bool("length_enabled", it->second);
  }
  if (auto it = values.find("ems_mode"); it != values.end()) {
    const auto mode = parse_ems_mode(it->second);
    if (!mode) {
      throw ValidationError("config key 'ems_mode': expected strict|token-f1, got '" +
                            it->second + "'");
    }
    config.ems_mode = *mode;
  }
  config.validate();
  return config;
}

std::string breakdown_to_line(const RewardBreakdown& breakdown,
                              std::string_view id) {
  JsonLine line;
  if (!id.empty()) line.add("id", id);
  line.add("r_format", breakdown.r_format)
      .add_optional("r_correct", breakdown.r_correct)
      .add_optional("r_length", breakdown.r_length);
  if (breakdown.raw_metric) {
    line.add("raw_metric", breakdown.raw_metric->value());
  } else {
    line.add_null("raw_metric");
  }
  return line.add("total", breakdown.total)
      .add("thinking_length", breakdown.thinking_length)
      .str();
}

std::string_view to_string(LengthUnit unit) {
  return unit == LengthUnit::kWords ? "words" : "chars";
}

std::optional<LengthUnit> parse_length_unit(std::string_view name) {
  if (name == "words") return LengthUnit::kWords;
  if (name == "chars") return LengthUnit::kCharacters;
  return std::nullopt;
}

}  // namespace vreward
