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

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define RQT_HAVE_AVX2_KERNEL 1
#endif

namespace rqt::simd {

#if defined(RQT_HAVE_AVX2_KERNEL)

__attribute__((target("avx2"))) bool any_weakly_dominates_avx2(const ObjectiveColumns& cols, double t,
                                                               double b, double v) {
    const std::size_t n = cols.size();
    const double* time = cols.time.data();
    const double* rate = cols.bitrate.data();
    const double* qual = cols.quality.data();

    const __m256d tv = _mm256_set1_pd(t);
    const __m256d bv = _mm256_set1_pd(b);
    const __m256d vv = _mm256_set1_pd(v);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // Ordered, non-signalling compares match the scalar operators on finite input.
        __m256d le_t = _mm256_cmp_pd(_mm256_loadu_pd(time + i), tv, _CMP_LE_OQ);
        __m256d le_b = _mm256_cmp_pd(_mm256_loadu_pd(rate + i), bv, _CMP_LE_OQ);
        __m256d ge_v = _mm256_cmp_pd(_mm256_loadu_pd(qual + i), vv, _CMP_GE_OQ);
        __m256d all = _mm256_and_pd(_mm256_and_pd(le_t, le_b), ge_v);
        if (_mm256_movemask_pd(all) != 0) {
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

bool any_weakly_dominates_avx2(const ObjectiveColumns& cols, double t, double b, double v) {
    return any_weakly_dominates_scalar(cols, t, b, v);
}

#endif

} // namespace rqt::simd
