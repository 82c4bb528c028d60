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

#include <gtest/gtest.h>

#include <array>
#include <random>
#include <string>

#include "oracles.h"

namespace vreward {
namespace {

TEST(ParseResponseTest, WellFormed) {
  const auto p = parse_response("<think>A is wrong because…</think><answer>B</answer>");
  EXPECT_TRUE(p.format_ok);
  ASSERT_TRUE(p.answer_span);
  EXPECT_EQ(*p.answer_span, "B");
  EXPECT_EQ(*p.think_span, "A is wrong because…");
  EXPECT_EQ(format_reward(p), 1);
}

TEST(ParseResponseTest, NoTags) {
  const auto p = parse_response("The answer is B");
  EXPECT_FALSE(p.format_ok);
  EXPECT_FALSE(p.think_span);
  EXPECT_FALSE(p.answer_span);
  EXPECT_EQ(p.thinking_length, 0u);
  EXPECT_EQ(format_reward(p), -1);
}

TEST(ParseResponseTest, DuplicateAnswerBlock) {
  EXPECT_FALSE(parse_response("<think>x</think><answer>1</answer><answer>2</answer>").format_ok);
}

TEST(ParseResponseTest, EmptyInput) {
  const auto p = parse_response("");
  EXPECT_FALSE(p.format_ok);
  EXPECT_EQ(format_reward(p), -1);
}

TEST(ParseResponseTest, SurroundingWhitespaceAllowedTextRejected) {
  EXPECT_TRUE(parse_response("\n  <think> a </think>\n\t<answer> b </answer>\n").format_ok);
  EXPECT_FALSE(parse_response("Sure! <think>a</think><answer>b</answer>").format_ok);
  EXPECT_FALSE(parse_response("<think>a</think><answer>b</answer> also C").format_ok);
  EXPECT_FALSE(parse_response("<think>a</think> so <answer>b</answer>").format_ok);
}

TEST(ParseResponseTest, OrderNestingAndCase) {
  EXPECT_FALSE(parse_response("<answer>b</answer><think>a</think>").format_ok);
  EXPECT_FALSE(parse_response("<think>a<think>b</think></think><answer>c</answer>").format_ok);
  EXPECT_FALSE(parse_response("<think>a<answer>x</answer></think><answer>c</answer>").format_ok);
  EXPECT_FALSE(parse_response("<THINK>a</THINK><ANSWER>b</ANSWER>").format_ok);
}

TEST(ParseResponseTest, SpansStripped) {
  const auto p = parse_response("<think>\n step one \n</think><answer>  (b). </answer>");
  EXPECT_EQ(*p.think_span, "step one");
  EXPECT_EQ(*p.answer_span, "(b).");
}

TEST(ThinkingLengthTest, Units) {
  const auto p = parse_response("<think>step one step two</think><answer>x</answer>");
  EXPECT_EQ(thinking_length(p, LengthUnit::kWords), 4u);
  const auto q = parse_response("<think>abc def</think><answer>x</answer>");
  EXPECT_EQ(thinking_length(q, LengthUnit::kCharacters), 7u);
  EXPECT_EQ(parse_response("<think>abc def</think><answer>x</answer>",
                           LengthUnit::kCharacters).thinking_length, 7u);
  EXPECT_EQ(thinking_length(parse_response("no tags"), LengthUnit::kWords), 0u);
  // Code points, not bytes.
  EXPECT_EQ(count_code_points("é…"), 2u);
}

TEST(ThinkingLengthTest, AnswerSpanNotCounted) {
  const auto p = parse_response("<think>a b</think><answer>c d e f</answer>");
  EXPECT_EQ(p.thinking_length, 2u);
}

// Exhaustive check of the tag rules against a regular-expression oracle over
// every sequence of up to six pieces drawn from the four tags, a word and
// whitespace.
TEST(ParseResponseTest, TagDecisionTableMatchesRegexOracle) {
  const std::array<std::string, 6> pieces = {"<think>", "</think>", "<answer>",
                                             "</answer>", "w", " "};
  std::size_t checked = 0;
  std::size_t well_formed = 0;
  std::vector<std::size_t> idx;
  for (std::size_t len = 0; len <= 6; ++len) {
    idx.assign(len, 0);
    for (;;) {
      std::string text;
      for (std::size_t i : idx) text += pieces[i];
      const bool expected = testing::regex_well_formed(text);
      ASSERT_EQ(parse_response(text).format_ok, expected) << "text: '" << text << "'";
      well_formed += expected ? 1 : 0;
      ++checked;
      std::size_t k = 0;
      while (k < len && ++idx[k] == pieces.size()) idx[k++] = 0;
      if (k == len) break;
    }
  }
  EXPECT_GT(well_formed, 0u);
  EXPECT_EQ(checked, 1u + 6u + 36u + 216u + 1296u + 7776u + 46656u);
}

std::string random_text(std::mt19937& rng) {
  static const std::array<std::string, 9> pieces = {
      "<think>", "</think>", "<answer>", "</answer>", " ", "\n", "B", "step", "<"};
  std::uniform_int_distribution<std::size_t> len(0, 12);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string text;
  for (std::size_t i = len(rng); i > 0; --i) text += pieces[pick(rng)];
  return text;
}

TEST(ParseResponsePropertyTest, RewardRangeAndIdempotence) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::string text = random_text(rng);
    const auto p = parse_response(text);
    EXPECT_TRUE(format_reward(p) == 1 || format_reward(p) == -1);
    EXPECT_EQ(parse_response(p.raw_text), p);
    if (p.format_ok) {
      EXPECT_TRUE(p.think_span && p.answer_span);
    }
    if (!p.think_span) {
      EXPECT_EQ(p.thinking_length, 0u);
    }
  }
}

TEST(ParseResponsePropertyTest, CanonicalTemplateAndClosingTagDeletion) {
  const std::array<std::pair<std::string, std::string>, 4> pairs = {{
      {"reason carefully", "B"},
      {"", ""},
      {"multi\nline  thought", "17 weeks"},
      {"a < b > c", "6:1"},
  }};
  for (const auto& [think, answer] : pairs) {
    const std::string canonical = "<think>" + think + "</think><answer>" + answer + "</answer>";
    EXPECT_TRUE(parse_response(canonical).format_ok) << canonical;
    const std::string no_think_close = "<think>" + think + "<answer>" + answer + "</answer>";
    const std::string no_answer_close = "<think>" + think + "</think><answer>" + answer;
    EXPECT_FALSE(parse_response(no_think_close).format_ok);
    EXPECT_FALSE(parse_response(no_answer_close).format_ok);
  }
}

TEST(ParseResponsePropertyTest, ThinkingLengthMonotoneUnderAppend) {
  std::string think = "start";
  std::size_t previous_words = 0;
  std::size_t previous_chars = 0;
  for (int i = 0; i < 50; ++i) {
    const std::string text = "<think>" + think + "</think><answer>A</answer>";
    const auto words = parse_response(text, LengthUnit::kWords).thinking_length;
    const auto chars = parse_response(text, LengthUnit::kCharacters).thinking_length;
    EXPECT_GE(words, previous_words);
    EXPECT_GE(chars, previous_chars);
    previous_words = words;
    previous_chars = chars;
    think += (i % 3 == 0) ? " tok" : "x";
  }
}

}  // namespace
}  // namespace vreward
