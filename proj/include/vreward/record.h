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

#include <optional>
#include <string>
#include <string_view>

#include "vreward/verify.h"

namespace vreward {

enum class TaskKind { kMultipleChoice, kNumeric, kOpenText };

TaskKind task_kind_of(GoldKind kind);
std::string_view to_string(TaskKind kind);

// One question: its gold answer, an optional target reasoning length, and
// the dataset it came from.
struct QARecord {
  std::string id;
  std::string question;
  GoldAnswer gold;
  std::optional<int> target_length;
  std::string source;

  TaskKind kind() const { return task_kind_of(gold.kind); }
  void validate() const;

  bool operator==(const QARecord&) const = default;
};

}  // namespace vreward
