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

#include "vreward/verify.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <unordered_map>

#include "text_util.h"
#include "vreward/errors.h"

namespace vreward {
namespace {

using internal::ascii_lower;
using internal::ascii_upper;
using internal::is_space;
using internal::trim;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_token_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || is_digit(c) || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) ||
         (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

std::size_t count_digits(std::string_view s, std::size_t pos) {
  std::size_t n = 0;
  while (pos + n < s.size() && is_digit(s[pos + n])) ++n;
  return n;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double f1(double overlap, double candidate_size, double reference_size) {
  const double precision = overlap / candidate_size;
  const double recall = overlap / reference_size;
  return 2.0 * precision * recall / (precision + recall);
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens,
                         std::size_t order) {
  NgramCounts counts;
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i,
                                      tokens.begin() + i + order)];
  }
  return counts;
}

}  // namespace

GoldAnswer GoldAnswer::option_label(char letter) {
  GoldAnswer gold;
  gold.kind = GoldKind::kOptionLabel;
  gold.option = ascii_upper(letter);
  gold.validate();
  return gold;
}

GoldAnswer GoldAnswer::numeric_range(double lower, double upper) {
  GoldAnswer gold;
  gold.kind = GoldKind::kNumericRange;
  gold.lower = lower;
  gold.upper = upper;
  gold.validate();
  return gold;
}

GoldAnswer GoldAnswer::literal_value(std::string literal) {
  GoldAnswer gold;
  gold.kind = GoldKind::kLiteralValue;
  gold.literal = std::move(literal);
  gold.validate();
  return gold;
}

GoldAnswer GoldAnswer::reference_text(std::string reference) {
  GoldAnswer gold;
  gold.kind = GoldKind::kReferenceText;
  gold.reference = std::move(reference);
  gold.validate();
  return gold;
}

void GoldAnswer::validate() const {
  const bool has_option = option.has_value();
  const bool has_range = lower.has_value() || upper.has_value();
  const bool has_literal = literal.has_value();
  const bool has_reference = reference.has_value();
  switch (kind) {
    case GoldKind::kOptionLabel:
      if (!has_option || has_range || has_literal || has_reference) {
        throw ValidationError("option gold must carry exactly one option letter");
      }
      if (*option < 'A' || *option > 'Z') {
        throw ValidationError(std::string("option gold must be a letter A-Z, got '") +
                              *option + "'");
      }
      break;
    case GoldKind::kNumericRange:
      if (!lower || !upper || has_option || has_literal || has_reference) {
        throw ValidationError("range gold must carry lower and upper bounds only");
      }
      if (!std::isfinite(*lower) || !std::isfinite(*upper)) {
        throw ValidationError("range bounds must be finite");
      }
      if (*lower > *upper) {
        throw ValidationError("range gold has lower > upper");
      }
      break;
    case GoldKind::kLiteralValue:
      if (!has_literal || has_option || has_range || has_reference) {
        throw ValidationError("literal gold must carry exactly one literal string");
      }
      break;
    case GoldKind::kReferenceText:
      if (!has_reference || has_option || has_range || has_literal) {
        throw ValidationError("text gold must carry exactly one reference string");
      }
      break;
  }
}

bool verify_option(std::string_view predicted, const GoldAnswer& gold) {
  if (gold.kind != GoldKind::kOptionLabel) {
    throw UsageError("verify_option requires an option gold");
  }
  auto strippable = [](char c) {
    return is_space(c) || c == '(' || c == ')' || c == '.';
  };
  std::string_view s = predicted;
  while (!s.empty() && strippable(s.front())) s.remove_prefix(1);
  while (!s.empty() && strippable(s.back())) s.remove_suffix(1);
  if (s.size() != 1) return false;
  const char letter = ascii_upper(s.front());
  if (letter < 'A' || letter > 'Z') return false;
  return letter == *gold.option;
}

std::optional<double> first_number(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool starts_int = is_digit(text[i]);
    const bool starts_frac =
        text[i] == '.' && i + 1 < text.size() && is_digit(text[i + 1]);
    if (!starts_int && !starts_frac) continue;

    std::string number;
    if (i > 0 && (text[i - 1] == '-' || text[i - 1] == '+')) {
      number += text[i - 1];
    }
    std::size_t pos = i;
    const std::size_t lead = count_digits(text, pos);
    number.append(text.substr(pos, lead));
    pos += lead;
    // Thousands groups only when the leading group has 1-3 digits.
    if (lead >= 1 && lead <= 3) {
      while (pos + 4 <= text.size() && text[pos] == ',' &&
             count_digits(text, pos + 1) == 3) {
        number.append(text.substr(pos + 1, 3));
        pos += 4;
      }
    }
    if (pos + 1 < text.size() && text[pos] == '.' && is_digit(text[pos + 1])) {
      const std::size_t frac = count_digits(text, pos + 1);
      number.append(text.substr(pos, frac + 1));
    }
    if (number.empty() || number == "+" || number == "-") continue;
    return std::strtod(number.c_str(), nullptr);
  }
  return std::nullopt;
}

bool verify_numeric(std::string_view predicted, const GoldAnswer& gold) {
  if (gold.kind == GoldKind::kNumericRange) {
    const auto value = first_number(predicted);
    if (!value) return false;
    return *gold.lower <= *value && *value <= *gold.upper;
  }
  if (gold.kind == GoldKind::kLiteralValue) {
    return internal::to_lower(trim(predicted)) ==
           internal::to_lower(trim(*gold.literal));
  }
  throw UsageError("verify_numeric requires a range or literal gold");
}

std::vector<std::string> metric_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_token_char(c)) {
      current += ascii_lower(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string normalize_for_match(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_ascii_punct(c)) continue;
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += ascii_lower(c);
  }
  return out;
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                     : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

MetricScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto cand = metric_tokens(candidate);
  const auto ref = metric_tokens(reference);
  const std::size_t lcs = lcs_length(cand, ref);
  if (lcs == 0) return MetricScore(0.0);
  return MetricScore(100.0 * f1(static_cast<double>(lcs),
                                static_cast<double>(cand.size()),
                                static_cast<double>(ref.size())));
}

MetricScore exact_match(std::string_view candidate, std::string_view reference,
                        EmsMode mode) {
  const std::string cand = normalize_for_match(candidate);
  const std::string ref = normalize_for_match(reference);
  if (mode == EmsMode::kStrict) {
    return MetricScore(cand == ref ? 100.0 : 0.0);
  }
  const auto cand_tokens = split_whitespace(cand);
  const auto ref_tokens = split_whitespace(ref);
  if (cand_tokens.empty() || ref_tokens.empty()) {
    return MetricScore(cand_tokens.empty() && ref_tokens.empty() ? 100.0 : 0.0);
  }
  std::unordered_map<std::string, std::size_t> ref_bag;
  for (const auto& t : ref_tokens) ++ref_bag[t];
  std::size_t common = 0;
  for (const auto& t : cand_tokens) {
    auto it = ref_bag.find(t);
    if (it != ref_bag.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return MetricScore(0.0);
  return MetricScore(100.0 * f1(static_cast<double>(common),
                                static_cast<double>(cand_tokens.size()),
                                static_cast<double>(ref_tokens.size())));
}

MetricScore mix_score(std::string_view candidate, std::string_view reference,
                      EmsMode mode) {
  return MetricScore((rouge_l(candidate, reference).value() +
                      exact_match(candidate, reference, mode).value()) /
                     2.0);
}

// Sentence BLEU up to 4-grams. Orders longer than the candidate are left out
// of the geometric mean; a zero precision at a used order is replaced by
// 1/(2 * candidate n-grams). No shared unigram at all scores 0.
MetricScore bleu(std::string_view candidate, std::string_view reference) {
  constexpr std::size_t kMaxOrder = 4;
  const auto cand = metric_tokens(candidate);
  const auto ref = metric_tokens(reference);
  if (cand.empty() || ref.empty()) return MetricScore(0.0);

  const std::size_t orders = std::min(kMaxOrder, cand.size());
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    const NgramCounts cand_counts = ngram_counts(cand, n);
    const NgramCounts ref_counts = ngram_counts(ref, n);
    std::size_t matches = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    const std::size_t total = cand.size() - n + 1;
    if (matches == 0 && n == 1) return MetricScore(0.0);
    const double precision =
        matches > 0 ? static_cast<double>(matches) / static_cast<double>(total)
                    : 1.0 / (2.0 * static_cast<double>(total));
    log_sum += std::log(precision);
  }
  const double cand_len = static_cast<double>(cand.size());
  const double ref_len = static_cast<double>(ref.size());
  const double brevity =
      cand_len < ref_len ? std::exp(1.0 - ref_len / cand_len) : 1.0;
  return MetricScore(100.0 * brevity *
                     std::exp(log_sum / static_cast<double>(orders)));
}

MetricScore open_text_score(std::string_view candidate,
                            std::string_view reference, OpenMetric metric,
                            EmsMode mode) {
  switch (metric) {
    case OpenMetric::kRougeL:
      return rouge_l(candidate, reference);
    case OpenMetric::kEms:
      return exact_match(candidate, reference, mode);
    case OpenMetric::kMix:
      return mix_score(candidate, reference, mode);
    case OpenMetric::kBleu:
      return bleu(candidate, reference);
  }
  return MetricScore(0.0);
}

std::string_view to_string(OpenMetric metric) {
  switch (metric) {
    case OpenMetric::kRougeL: return "rouge";
    case OpenMetric::kEms: return "ems";
    case OpenMetric::kMix: return "mix";
    case OpenMetric::kBleu: return "bleu";
  }
  return "rouge";
}

std::string_view to_string(EmsMode mode) {
  return mode == EmsMode::kStrict ? "strict" : "token-f1";
}

std::optional<OpenMetric> parse_open_metric(std::string_view name) {
  if (name == "rouge") return OpenMetric::kRougeL;
  if (name == "ems") return OpenMetric::kEms;
  if (name == "mix") return OpenMetric::kMix;
  if (name == "bleu") return OpenMetric::kBleu;
  return std::nullopt;
}

std::optional<EmsMode> parse_ems_mode(std::string_view name) {
  if (name == "strict") return EmsMode::kStrict;
  if (name == "token-f1") return EmsMode::kTokenF1;
  return std::nullopt;
}

}  // namespace vreward
