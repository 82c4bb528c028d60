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

// A synthetic evaluation corpus whose per-record verdicts are known by
// construction, plus a naive recount of the report from those labels.

#include <algorithm>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oracles.h"
#include "vreward/corpus.h"

namespace vreward::testing {

struct Label {
  bool missing = false;
  bool format_ok = false;
  bool correct = false;
  double rouge = 0.0;
  double ems = 0.0;
};

struct LabeledCorpus {
  std::vector<QARecord> records;
  Predictions predictions;
  std::vector<Label> labels;  // parallel to records
};

// Verdicts hold for the default reward configuration (Mix, tau 50, strict EMS).
inline LabeledCorpus make_labeled_corpus(unsigned seed, std::size_t count) {
  static const std::vector<std::string> kSources = {"alpha", "beta", "gamma"};
  static const std::vector<std::string> kWords = {"amber", "birch", "cedar", "delta",
                                                  "ember", "fjord", "grove", "heath"};
  std::mt19937 rng(seed);
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  auto wrap = [](const std::string& answer, bool well_formed) {
    return well_formed ? "<think>work it out</think>\n<answer>" + answer + "</answer>"
                       : "<answer>" + answer + "</answer>";
  };

  LabeledCorpus corpus;
  for (std::size_t i = 0; i < count; ++i) {
    QARecord record;
    record.id = "r" + std::to_string(10000 + i);
    record.question = "question " + std::to_string(i);
    record.source = kSources[pick(kSources.size())];
    const std::size_t kind = pick(4);
    // 0 correct, 1 incorrect, 2 malformed, 3 missing, 4 partial (text only)
    const std::size_t outcome = pick(kind == 3 ? 5 : 4);
    Label label;
    label.missing = outcome == 3;
    label.format_ok = outcome == 0 || outcome == 1 || outcome == 4;
    label.correct = outcome == 0;

    std::string answer;
    switch (kind) {
      case 0: {
        const char gold = static_cast<char>('A' + pick(5));
        record.gold = GoldAnswer::option_label(gold);
        answer = outcome == 1 ? std::string(1, gold == 'A' ? 'B' : 'A')
                              : "(" + std::string(1, gold) + ")";
        break;
      }
      case 1: {
        const double lower = 10.0 * static_cast<double>(pick(50));
        record.gold = GoldAnswer::numeric_range(lower, lower + 5.0);
        answer = "about " + std::to_string(static_cast<int>(lower) + (outcome == 1 ? 9 : 2));
        break;
      }
      case 2:
        record.gold = GoldAnswer::literal_value("Paris");
        answer = outcome == 1 ? "London" : "  paris ";
        break;
      default: {
        std::vector<std::string> words = kWords;
        std::shuffle(words.begin(), words.end(), rng);
        words.resize(6);
        std::string reference;
        for (const auto& w : words) reference += (reference.empty() ? "" : " ") + w;
        record.gold = GoldAnswer::reference_text(reference);
        if (outcome == 1) {
          answer = "quartz slate";
        } else if (outcome == 4) {
          answer = words[0] + " " + words[1];
          label.rouge = rouge_from_lcs(2, 2, 6);
        } else {
          answer = reference;
          label.rouge = label.format_ok ? 100.0 : 0.0;
          label.ems = label.format_ok ? 100.0 : 0.0;
        }
        break;
      }
    }
    if (!label.missing) corpus.predictions[record.id] = wrap(answer, outcome != 2);
    corpus.records.push_back(std::move(record));
    corpus.labels.push_back(label);
  }
  return corpus;
}

// Rebuilds the report from labels alone: groups ordered by (source, kind),
// records visited in id order.
inline EvalReport recount(const LabeledCorpus& corpus) {
  std::vector<std::size_t> order(corpus.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus.records[a].id < corpus.records[b].id;
  });
  struct Tally {
    long long count = 0, correct = 0, compliant = 0, missing = 0;
    double rouge = 0.0, ems = 0.0;
  };
  std::map<std::pair<std::string, int>, Tally> tallies;
  EvalReport report;
  for (std::size_t i : order) {
    const QARecord& r = corpus.records[i];
    const Label& l = corpus.labels[i];
    Tally& t = tallies[{r.source, static_cast<int>(r.kind())}];
    ++t.count;
    t.correct += l.correct;
    t.compliant += l.format_ok;
    t.missing += l.missing;
    t.rouge += l.rouge;
    t.ems += l.ems;
    ++report.count;
    report.compliant += l.format_ok;
    if (l.missing) report.missing_ids.push_back(r.id);
  }
  for (const auto& [key, t] : tallies) {
    GroupStats g;
    g.source = key.first;
    g.kind = static_cast<TaskKind>(key.second);
    g.count = t.count;
    g.correct = t.correct;
    g.compliant = t.compliant;
    g.missing = t.missing;
    g.accuracy = 100.0 * static_cast<double>(t.correct) / static_cast<double>(t.count);
    if (g.kind == TaskKind::kOpenText) {
      g.mean_rouge = t.rouge / static_cast<double>(t.count);
      g.mean_ems = t.ems / static_cast<double>(t.count);
    }
    report.groups.push_back(std::move(g));
  }
  report.format_compliance =
      100.0 * static_cast<double>(report.compliant) / static_cast<double>(report.count);
  return report;
}

}  // namespace vreward::testing
