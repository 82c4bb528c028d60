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

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vreward {

// Score on a 0-100 scale. Construction clamps into range so floating
// round-off never escapes the interval.
class MetricScore {
 public:
  constexpr MetricScore() = default;
  constexpr explicit MetricScore(double value)
      : value_(value < 0.0 ? 0.0 : (value > 100.0 ? 100.0 : value)) {}

  constexpr double value() const { return value_; }
  auto operator<=>(const MetricScore&) const = default;

 private:
  double value_ = 0.0;
};

enum class GoldKind { kOptionLabel, kNumericRange, kLiteralValue, kReferenceText };

// Ground truth for one question. Only the fields implied by `kind` are set;
// use the named constructors, which validate.
struct GoldAnswer {
  GoldKind kind = GoldKind::kOptionLabel;
  std::optional<char> option;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<std::string> literal;
  std::optional<std::string> reference;

  static GoldAnswer option_label(char letter);
  static GoldAnswer numeric_range(double lower, double upper);
  static GoldAnswer literal_value(std::string literal);
  static GoldAnswer reference_text(std::string reference);

  // Throws ValidationError when the field set does not match `kind` or a
  // range is inverted.
  void validate() const;

  bool operator==(const GoldAnswer&) const = default;
};

enum class OpenMetric { kRougeL, kEms, kMix, kBleu };
enum class EmsMode { kStrict, kTokenF1 };

bool verify_option(std::string_view predicted, const GoldAnswer& gold);
bool verify_numeric(std::string_view predicted, const GoldAnswer& gold);

// First decimal number in `text`. Accepts a sign directly before the
// digits and comma thousands separators ("1,250.5"). "6:01" yields 6.
std::optional<double> first_number(std::string_view text);

// Lowercased alphanumeric runs. Bytes >= 0x80 count as alphanumeric so
// non-ASCII words are kept whole rather than dropped.
std::vector<std::string> metric_tokens(std::string_view text);

// Lowercase, drop ASCII punctuation, collapse whitespace.
std::string normalize_for_match(std::string_view text);

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

MetricScore rouge_l(std::string_view candidate, std::string_view reference);
MetricScore exact_match(std::string_view candidate, std::string_view reference,
                        EmsMode mode = EmsMode::kStrict);
MetricScore mix_score(std::string_view candidate, std::string_view reference,
                      EmsMode mode = EmsMode::kStrict);
MetricScore bleu(std::string_view candidate, std::string_view reference);

MetricScore open_text_score(std::string_view candidate,
                            std::string_view reference, OpenMetric metric,
                            EmsMode mode = EmsMode::kStrict);

std::string_view to_string(OpenMetric metric);
std::string_view to_string(EmsMode mode);
std::optional<OpenMetric> parse_open_metric(std::string_view name);
std::optional<EmsMode> parse_ems_mode(std::string_view name);

}  // namespace vreward
