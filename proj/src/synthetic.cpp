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

#include "rqt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace rqt::synthetic {

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double jitter(std::uint64_t hash, int lane) {
    std::mt19937_64 rng(hash + static_cast<std::uint64_t>(lane) * 0x9E3779B97F4A7C15ULL);
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
}

int width_for(int height) {
    int w = (height * 16 + 4) / 9;
    return w % 2 == 0 ? w : w + 1;
}

Encode model(std::string_view sequence, int height, int qp, double fps, long long frames, std::uint64_t seed) {
    constexpr double kUhdPixels = 3840.0 * 2160.0;

    // Per-sequence content traits.
    const std::uint64_t content = fnv1a(sequence, seed);
    const double complexity = 1.1 + 0.5 * jitter(content, 0);   // [0.6, 1.6)
    const double texture = 1.25 + 0.75 * jitter(content, 1);    // [0.5, 2.0)

    // Per-encode measurement noise.
    const std::uint64_t point =
        fnv1a(std::string(sequence) + "|" + std::to_string(height) + "|" + std::to_string(qp), seed);

    const double pixels = static_cast<double>(width_for(height)) * height;
    const double rho = pixels / kUhdPixels;

    Encode e{};
    e.bitrate_kbps = complexity * 18000.0 * std::pow(rho, 0.8) * std::exp2(-(qp - 10) / 6.0) *
                     (1.0 + 0.02 * jitter(point, 0));

    const double bits_per_frame = e.bitrate_kbps * 1000.0 / fps;
    const double frame_time = 0.033 * std::pow(rho, 1.5) + bits_per_frame * 1.5e-8;
    e.decode_time_s = static_cast<double>(frames) * frame_time * (1.0 + 0.03 * jitter(point, 1));

    const double coding_mse = complexity * std::exp2((qp - 10) / 6.0);
    const double upscale_mse = 4.0 * texture * std::pow(2160.0 / height - 1.0, 1.3);
    const double peak = 255.0 * 255.0;
    e.xpsnr_db = 10.0 * std::log10(peak / (upscale_mse + coding_mse)) + 0.05 * jitter(point, 2);
    e.psnr_db = 10.0 * std::log10(peak / (1.3 * upscale_mse + 1.1 * coding_mse)) + 0.05 * jitter(point, 3);
    e.vmaf = std::clamp(100.0 / (1.0 + std::exp(-(e.xpsnr_db - 32.0) / 3.2)), 0.0, 100.0);
    return e;
}

} // namespace rqt::synthetic
