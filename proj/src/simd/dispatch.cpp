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

#include <cstdlib>
#include <string>

#include "rqt/simd/dominance.hpp"

namespace rqt::simd {

std::string_view to_string(Isa isa) {
    switch (isa) {
    case Isa::Scalar:
        return "scalar";
    case Isa::Avx2:
        return "avx2";
    case Isa::Neon:
        return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

namespace {

Isa detect() {
    if (const char* env = std::getenv("RQT_SIMD")) {
        const std::string wanted(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (wanted == to_string(isa) && isa_available(isa)) {
                return isa;
            }
        }
    }
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

} // namespace

Isa active_isa() {
    static const Isa isa = detect();
    return isa;
}

bool any_weakly_dominates(const ObjectiveColumns& cols, double t, double b, double v) {
    switch (active_isa()) {
    case Isa::Avx2:
        return any_weakly_dominates_avx2(cols, t, b, v);
    case Isa::Neon:
        return any_weakly_dominates_neon(cols, t, b, v);
    case Isa::Scalar:
        break;
    }
    return any_weakly_dominates_scalar(cols, t, b, v);
}

} // namespace rqt::simd
