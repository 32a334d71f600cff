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

#include "rqt/simd/dominance.hpp"

namespace rqt::simd {

bool any_weakly_dominates_scalar(const ObjectiveColumns& cols, double t, double b, double v) {
    const std::size_t n = cols.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cols.time[i] <= t && cols.bitrate[i] <= b && cols.quality[i] >= v) {
            return true;
        }
    }
    return false;
}

} // namespace rqt::simd
