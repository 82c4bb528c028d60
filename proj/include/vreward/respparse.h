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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace vreward {

enum class LengthUnit { kWords, kCharacters };

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kAnswerOpen = "<answer>";
inline constexpr std::string_view kAnswerClose = "</answer>";

// Structured view of one model output.
//
// A response is well formed when it is exactly one think block followed by
// exactly one answer block, separated and surrounded by whitespace only.
// Tags are matched case-sensitively. Spans are extracted from the first
// open tag and the first matching close tag after it even when the response
// is malformed, so a malformed response may still carry spans.
struct ParsedResponse {
  std::string raw_text;
  std::optional<std::string> think_span;
  std::optional<std::string> answer_span;
  bool format_ok = false;
  std::size_t thinking_length = 0;

  bool operator==(const ParsedResponse&) const = default;
};

ParsedResponse parse_response(std::string_view raw_text,
                              LengthUnit unit = LengthUnit::kWords);

// +1 when the response is well formed, -1 otherwise.
int format_reward(const ParsedResponse& parsed);

// Length of the think span only; 0 when the span is absent. Words are
// whitespace-delimited tokens, characters are UTF-8 code points.
std::size_t thinking_length(const ParsedResponse& parsed, LengthUnit unit);

std::size_t count_words(std::string_view text);
std::size_t count_code_points(std::string_view text);

}  // namespace vreward
