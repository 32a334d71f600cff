// Copyright 2026 The rqtpf Authors
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

// Small text helpers shared by the CSV and JSON writers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rqt {

// Shortest representation that round-trips through strtod.
std::string format_double(double value);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Replaces every "{key}" occurrence in `text`; unknown placeholders are left intact.
std::string substitute(std::string text, std::string_view key, std::string_view value);

} // namespace rqt
