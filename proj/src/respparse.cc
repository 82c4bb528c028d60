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

#include "vreward/respparse.h"

#include <string_view>

#include "text_util.h"

namespace vreward {
namespace {

using internal::is_blank;
using internal::is_space;
using internal::trim;

std::size_t count_occurrences(std::string_view text, std::string_view tag) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(tag); pos != std::string_view::npos;
       pos = text.find(tag, pos + tag.size())) {
    ++n;
  }
  return n;
}

// Contents between the first `open` and the first `close` after it.
std::optional<std::string> extract_span(std::string_view text,
                                        std::string_view open,
                                        std::string_view close) {
  const std::size_t begin = text.find(open);
  if (begin == std::string_view::npos) return std::nullopt;
  const std::size_t inner = begin + open.size();
  const std::size_t end = text.find(close, inner);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(trim(text.substr(inner, end - inner)));
}

bool well_formed(std::string_view text) {
  for (std::string_view tag :
       {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose}) {
    if (count_occurrences(text, tag) != 1) return false;
  }
  const std::size_t think_open = text.find(kThinkOpen);
  const std::size_t think_close = text.find(kThinkClose);
  const std::size_t answer_open = text.find(kAnswerOpen);
  const std::size_t answer_close = text.find(kAnswerClose);
  if (!(think_open < think_close && think_close < answer_open &&
        answer_open < answer_close)) {
    return false;
  }
  const std::size_t gap_begin = think_close + kThinkClose.size();
  const std::size_t tail_begin = answer_close + kAnswerClose.size();
  return is_blank(text.substr(0, think_open)) &&
         is_blank(text.substr(gap_begin, answer_open - gap_begin)) &&
         is_blank(text.substr(tail_begin));
}

}  // namespace

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::size_t count_code_points(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

ParsedResponse parse_response(std::string_view raw_text, LengthUnit unit) {
  ParsedResponse parsed;
  parsed.raw_text = std::string(raw_text);
  parsed.think_span = extract_span(raw_text, kThinkOpen, kThinkClose);
  parsed.answer_span = extract_span(raw_text, kAnswerOpen, kAnswerClose);
  parsed.format_ok = well_formed(raw_text);
  parsed.thinking_length = thinking_length(parsed, unit);
  return parsed;
}

int format_reward(const ParsedResponse& parsed) {
  return parsed.format_ok ? 1 : -1;
}

std::size_t thinking_length(const ParsedResponse& parsed, LengthUnit unit) {
  if (!parsed.think_span) return 0;
  return unit == LengthUnit::kWords ? count_words(*parsed.think_span)
                                    : count_code_points(*parsed.think_span);
}

}  // namespace vreward
