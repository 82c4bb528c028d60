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

#include <map>
#include <optional>
#include <string>

#include "vreward/record.h"
#include "vreward/respparse.h"
#include "vreward/verify.h"

namespace vreward {

// Correctness threshold used for open-text gold when none is configured:
// 40 for Rouge-L, 50 for Mix, 70 for EMS. BLEU is a diagnostic mode and
// shares the Mix threshold.
double default_tau(OpenMetric metric);

inline constexpr int kDefaultAlpha = 1024;

struct RewardConfig {
  double tau = default_tau(OpenMetric::kMix);
  int alpha = kDefaultAlpha;
  OpenMetric open_metric = OpenMetric::kMix;
  LengthUnit length_unit = LengthUnit::kWords;
  // Length term applies only when this is set and the record has a target.
  bool length_enabled = true;
  EmsMode ems_mode = EmsMode::kStrict;

  static RewardConfig for_metric(OpenMetric metric);

  // Throws ValidationError unless alpha > 0 and 0 <= tau <= 100.
  void validate() const;

  bool operator==(const RewardConfig&) const = default;
};

struct CorrectnessResult {
  int reward = -1;
  std::optional<MetricScore> raw_metric;
};

struct RewardBreakdown {
  int r_format = -1;
  std::optional<int> r_correct;
  std::optional<double> r_length;
  std::optional<MetricScore> raw_metric;
  double total = -1.0;
  std::size_t thinking_length = 0;

  bool operator==(const RewardBreakdown&) const = default;
};

// max(-1, min(1, 1 - |l_y - l_gold| / alpha)). Throws UsageError when
// alpha <= 0.
double length_reward(long long thinking_length, long long target_length,
                     int alpha);

// Requires parsed.format_ok; throws UsageError otherwise. Open-text gold is
// correct only when the metric score strictly exceeds tau.
CorrectnessResult correctness_reward(const ParsedResponse& parsed,
                                     const GoldAnswer& gold,
                                     const RewardConfig& config);

// Format-gated sum of the three terms. Malformed text scores exactly -1.
RewardBreakdown total_reward(std::string_view raw_text, const QARecord& record,
                             const RewardConfig& config);

// Flat key-value view (keys: tau, alpha, open_metric, length_unit,
// length_enabled, ems_mode).
std::map<std::string, std::string> to_key_values(const RewardConfig& config);

// Overlays `values` onto `base`. When open_metric is given without tau, tau
// follows the metric's default. Keys outside the reward set are ignored;
// bad values throw ValidationError.
RewardConfig apply_key_values(const std::map<std::string, std::string>& values,
                              RewardConfig base = {});

// Machine-readable breakdown: r_format, r_correct, r_length, raw_metric,
// total, thinking_length (absent terms are null; reals use four decimals).
// A non-empty id is written first.
std::string breakdown_to_line(const RewardBreakdown& breakdown,
                              std::string_view id = {});

std::string_view to_string(LengthUnit unit);
std::optional<LengthUnit> parse_length_unit(std::string_view name);

}  // namespace vreward
