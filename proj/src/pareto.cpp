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

#include "rqt/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rqt/errors.hpp"
#include "rqt/simd/dominance.hpp"
#include "rqt/text.hpp"

namespace rqt {

Alpha::Alpha(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw UsageError("alpha must lie in [0, 1], got " + format_double(value));
    }
}

double composite_metric(const EncodePoint& point, Alpha alpha) {
    const double a = alpha.value();
    return a * std::log10(point.decode_time_s) + (1.0 - a) * std::log10(point.bitrate_kbps);
}

bool dominates_3d(const EncodePoint& a, const EncodePoint& b, QualityMetric metric) {
    const double va = a.require_quality(metric);
    const double vb = b.require_quality(metric);
    const bool weak = a.decode_time_s <= b.decode_time_s && a.bitrate_kbps <= b.bitrate_kbps && va >= vb;
    const bool strict = a.decode_time_s < b.decode_time_s || a.bitrate_kbps < b.bitrate_kbps || va > vb;
    return weak && strict;
}

bool dominates_mv(const ObjectiveVector& a, const ObjectiveVector& b) {
    return a.m <= b.m && a.v >= b.v && (a.m < b.m || a.v > b.v);
}

bool ParetoFront::contains(int resolution, int qp) const {
    return std::any_of(members.begin(), members.end(), [&](const FrontMember& f) {
        return f.point.resolution == resolution && f.point.qp == qp;
    });
}

namespace {

void require_non_empty(const MeasurementSet& set) {
    if (set.empty()) {
        throw DataError("cannot compute a Pareto front of the empty set for sequence '" + set.sequence().name + "'");
    }
}

// Deterministic representative for identical objective vectors.
bool tie_before(const EncodePoint& a, const EncodePoint& b) {
    if (a.qp != b.qp) return a.qp < b.qp;
    return a.resolution < b.resolution;
}

} // namespace

ParetoFront pareto_front_mv(const MeasurementSet& set, Alpha alpha, QualityMetric metric) {
    require_non_empty(set);
    const auto points = set.points();

    std::vector<ObjectiveVector> vectors;
    vectors.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        vectors.push_back({composite_metric(points[i], alpha), points[i].require_quality(metric), i});
    }
    std::sort(vectors.begin(), vectors.end(), [&](const ObjectiveVector& a, const ObjectiveVector& b) {
        if (a.m != b.m) return a.m < b.m;
        if (a.v != b.v) return a.v > b.v;
        return tie_before(points[a.source], points[b.source]);
    });

    // Every earlier vector has m no larger, so a point survives only if its
    // quality beats everything seen so far.
    ParetoFront front{ObjectiveSpace::MV, alpha, metric, {}};
    bool first = true;
    double best_v = 0.0;
    for (const auto& ov : vectors) {
        if (first || ov.v > best_v) {
            front.members.push_back({points[ov.source], ov.v, ov.m});
            best_v = ov.v;
            first = false;
        }
    }
    return front;
}

ParetoFront pareto_front_3d(const MeasurementSet& set, QualityMetric metric) {
    require_non_empty(set);
    const auto points = set.points();

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> quality(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        quality[i] = points[i].require_quality(metric);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = points[a];
        const auto& pb = points[b];
        if (pa.decode_time_s != pb.decode_time_s) return pa.decode_time_s < pb.decode_time_s;
        if (pa.bitrate_kbps != pb.bitrate_kbps) return pa.bitrate_kbps < pb.bitrate_kbps;
        if (quality[a] != quality[b]) return quality[a] > quality[b];
        return tie_before(pa, pb);
    });

    // In this order no later point can dominate an earlier one, and dominance
    // is transitive, so a point is on the front iff no kept point weakly
    // dominates it. Weak (not strict) also collapses duplicates.
    std::vector<double> kept_t, kept_b, kept_v;
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const auto& p = points[idx];
        simd::ObjectiveColumns cols{kept_t, kept_b, kept_v};
        if (simd::any_weakly_dominates(cols, p.decode_time_s, p.bitrate_kbps, quality[idx])) {
            continue;
        }
        kept_t.push_back(p.decode_time_s);
        kept_b.push_back(p.bitrate_kbps);
        kept_v.push_back(quality[idx]);
        kept.push_back(idx);
    }

    std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = points[a];
        const auto& pb = points[b];
        if (pa.bitrate_kbps != pb.bitrate_kbps) return pa.bitrate_kbps < pb.bitrate_kbps;
        if (pa.decode_time_s != pb.decode_time_s) return pa.decode_time_s < pb.decode_time_s;
        return quality[a] > quality[b];
    });

    ParetoFront front{ObjectiveSpace::TBV, std::nullopt, metric, {}};
    front.members.reserve(kept.size());
    for (std::size_t idx : kept) {
        front.members.push_back({points[idx], quality[idx], std::nullopt});
    }
    return front;
}

nlohmann::json to_json(const ParetoFront& front, const std::string& sequence) {
    nlohmann::json header{
        {"alpha", front.alpha ? nlohmann::json(front.alpha->value()) : nlohmann::json(nullptr)},
        {"quality_metric", std::string(to_string(front.metric))},
        {"objective_space", front.space == ObjectiveSpace::MV ? "mv" : "3d"},
    };
    auto points = nlohmann::json::array();
    for (const auto& m : front.members) {
        points.push_back({
            {"resolution", m.point.resolution},
            {"qp", m.point.qp},
            {"bitrate_kbps", m.point.bitrate_kbps},
            {"decode_time_s", m.point.decode_time_s},
            {"quality", m.quality},
            {"m", m.m ? nlohmann::json(*m.m) : nlohmann::json(nullptr)},
        });
    }
    return nlohmann::json{{"sequence", sequence}, {"header", std::move(header)}, {"points", std::move(points)}};
}

} // namespace rqt
