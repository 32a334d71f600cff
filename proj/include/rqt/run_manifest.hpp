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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace rqt {

std::string sha256_hex(std::string_view data);
// Throws DataError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

// Provenance record written next to every command's outputs. The run id is a
// digest of the command, configuration and input contents only, so repeated
// runs over identical inputs share it and emitted artifacts stay
// byte-identical. The timestamp honours SOURCE_DATE_EPOCH when set.
struct RunManifest {
    struct FileDigest {
        std::string path;
        std::string sha256;
    };

    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::vector<FileDigest> inputs;
    std::map<std::string, std::string> tool_versions;
    std::vector<FileDigest> outputs;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);

    std::string run_id() const;
    nlohmann::json to_json() const;
    void write(const std::filesystem::path& path) const;
};

std::string utc_timestamp();

} // namespace rqt
