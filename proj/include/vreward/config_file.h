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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace vreward {

// Environment variable naming the default configuration file.
inline constexpr const char* kConfigEnvVar = "VREWARD_CONFIG";

// Flat "key = value" lines; '#' starts a comment; blank lines are skipped.
// Throws ValidationError naming the line for anything else.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> load_key_value_file(
    const std::filesystem::path& path);
std::string format_key_values(const std::map<std::string, std::string>& values);

}  // namespace vreward
