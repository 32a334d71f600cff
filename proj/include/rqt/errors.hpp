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

#include <stdexcept>
#include <string>

namespace rqt {

// Invalid user input: bad flags, out-of-range parameters, malformed config.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data violates a model invariant (bad CSV row, duplicate key, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An external encoder/decoder/metric tool could not be run or failed.
class ToolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rqt
