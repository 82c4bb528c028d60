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

#include "vreward/record.h"

#include "vreward/errors.h"

namespace vreward {

TaskKind task_kind_of(GoldKind kind) {
  switch (kind) {
    case GoldKind::kOptionLabel:
      return TaskKind::kMultipleChoice;
    case GoldKind::kNumericRange:
    case GoldKind::kLiteralValue:
      return TaskKind::kNumeric;
    case GoldKind::kReferenceText:
      return TaskKind::kOpenText;
  }
  return TaskKind::kOpenText;
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kMultipleChoice: return "mcq";
    case TaskKind::kNumeric: return "numeric";
    case TaskKind::kOpenText: return "open";
  }
  return "open";
}

void QARecord::validate() const {
  if (id.empty()) throw ValidationError("record id must be non-empty");
  gold.validate();
  if (target_length && *target_length <= 0) {
    throw ValidationError("target_length must be positive");
  }
}

}  // namespace vreward
