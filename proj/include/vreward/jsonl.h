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

namespace vreward {

// Fixed four-decimal rendering used for every numeric field we emit.
std::string fixed4(double value);

// Builds one JSON object on a single line, preserving insertion order.
// Reals are written with fixed4 so outputs are byte-comparable.
class JsonLine {
 public:
  JsonLine& add(std::string_view key, std::string_view value);
  JsonLine& add(std::string_view key, const char* value) {
    return add(key, std::string_view(value));
  }
  JsonLine& add(std::string_view key, double value);
  JsonLine& add(std::string_view key, long long value);
  JsonLine& add(std::string_view key, int value) {
    return add(key, static_cast<long long>(value));
  }
  JsonLine& add(std::string_view key, std::size_t value) {
    return add(key, static_cast<long long>(value));
  }
  JsonLine& add(std::string_view key, bool value);
  JsonLine& add_null(std::string_view key);
  // Inserts pre-rendered JSON (an array or object) verbatim.
  JsonLine& add_raw(std::string_view key, std::string_view json);

  template <typename T>
  JsonLine& add_optional(std::string_view key, const std::optional<T>& value) {
    return value ? add(key, *value) : add_null(key);
  }

  std::string str() const { return "{" + body_ + "}"; }

 private:
  void key(std::string_view k);
  std::string body_;
};

}  // namespace vreward
