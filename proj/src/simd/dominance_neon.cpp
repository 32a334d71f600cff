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

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace rqt::simd {

#if defined(__aarch64__)

bool any_weakly_dominates_neon(const ObjectiveColumns& cols, double t, double b, double v) {
    const std::size_t n = cols.size();
    const double* time = cols.time.data();
    const double* rate = cols.bitrate.data();
    const double* qual = cols.quality.data();

    const float64x2_t tv = vdupq_n_f64(t);
    const float64x2_t bv = vdupq_n_f64(b);
    const float64x2_t vv = vdupq_n_f64(v);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        uint64x2_t le_t = vcleq_f64(vld1q_f64(time + i), tv);
        uint64x2_t le_b = vcleq_f64(vld1q_f64(rate + i), bv);
        uint64x2_t ge_v = vcgeq_f64(vld1q_f64(qual + i), vv);
        uint64x2_t all = vandq_u64(vandq_u64(le_t, le_b), ge_v);
        if ((vgetq_lane_u64(all, 0) | vgetq_lane_u64(all, 1)) != 0) {
            return true;
        }
    }
    for (; i < n; ++i) {
        if (time[i] <= t && rate[i] <= b && qual[i] >= v) {
            return true;
        }
    }
    return false;
}

#else

bool any_weakly_dominates_neon(const ObjectiveColumns& cols, double t, double b, double v) {
    return any_weakly_dominates_scalar(cols, t, b, v);
}

#endif

} // namespace rqt::simd
