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

// Deterministic stand-in for an encoder/decoder/metric toolchain.
//
// Every quantity is a closed-form function of (sequence, height, qp, seed),
// shaped like real UHD encodes: bitrate falls ~2x per 6 QP steps, decode time
// grows superlinearly with pixel count and mildly with bitrate, and quality is capped per resolution by an
// upscaling-loss term, so the rate-quality curves of different resolutions
// cross. Used by the bundled stub tool and by tests.

#include <cstdint>
#include <string_view>

namespace rqt::synthetic {

struct Encode {
    double bitrate_kbps;
    double decode_time_s;
    double psnr_db;
    double xpsnr_db;
    double vmaf;
};

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0);

// Uniform in [-1, 1), derived from a hash.
double jitter(std::uint64_t hash, int lane);

int width_for(int height);

Encode model(std::string_view sequence, int height, int qp, double fps, long long frames, std::uint64_t seed = 0);

} // namespace rqt::synthetic
