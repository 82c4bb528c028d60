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

#include "vreward/config_file.h"

#include <fstream>
#include <sstream>

#include "text_util.h"
#include "vreward/errors.h"

namespace vreward {

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> values;
  std::size_t line_number = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_number;
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = internal::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_number) +
                            ": expected key = value");
    }
    const std::string key(internal::trim(line.substr(0, eq)));
    const std::string value(internal::trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ValidationError("config line " + std::to_string(line_number) +
                            ": empty key");
    }
    values[key] = value;
  }
  return values;
}

std::map<std::string, std::string> load_key_value_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str());
}

std::string format_key_values(const std::map<std::string, std::string>& values) {
  std::string out;
  for (const auto& [key, value] : values) out += key + " = " + value + "\n";
  return out;
}

}  // namespace vreward
