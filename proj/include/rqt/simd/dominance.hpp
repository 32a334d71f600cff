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

// Weak-dominance scan over a structure-of-arrays block of objective vectors.
//
// The scan answers: does any stored point p satisfy
//     time[p] <= t  &&  bitrate[p] <= b  &&  quality[p] >= v ?
// It is the inner loop of the three-objective front sweep. A scalar reference
// kernel is always built; AVX2 (x86-64) and NEON (AArch64) variants are
// selected at runtime and must return identical answers.

#include <cstddef>
#include <span>
#include <string_view>

namespace rqt::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct ObjectiveColumns {
    std::span<const double> time;
    std::span<const double> bitrate;
    std::span<const double> quality;

    std::size_t size() const { return time.size(); }
};

bool any_weakly_dominates_scalar(const ObjectiveColumns& cols, double t, double b, double v);
bool any_weakly_dominates_avx2(const ObjectiveColumns& cols, double t, double b, double v);
bool any_weakly_dominates_neon(const ObjectiveColumns& cols, double t, double b, double v);

// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

// Best available variant. RQT_SIMD=scalar|avx2|neon in the environment
// overrides the choice (ignored when the requested variant is unavailable).
Isa active_isa();

bool any_weakly_dominates(const ObjectiveColumns& cols, double t, double b, double v);

} // namespace rqt::simd
