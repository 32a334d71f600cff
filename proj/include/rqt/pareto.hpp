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

#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"
#include "rqt/measurements.hpp"

namespace rqt {

// Weight between log decode time (alpha = 1) and log bitrate (alpha = 0).
class Alpha {
public:
    // Throws UsageError unless 0 <= value <= 1.
    explicit Alpha(double value);

    double value() const { return value_; }

    bool operator==(const Alpha&) const = default;

private:
    double value_;
};

// alpha * log10(decode_time_s) + (1 - alpha) * log10(bitrate_kbps).
double composite_metric(const EncodePoint& point, Alpha alpha);

// A point projected into the reduced (m, v) space. `source` indexes the
// originating point in its MeasurementSet.
struct ObjectiveVector {
    double m = 0.0;
    double v = 0.0;
    std::size_t source = 0;
};

// Minimise decode time and bitrate, maximise quality; weak dominance with at
// least one strict inequality. Throws DataError if either point lacks `metric`.
bool dominates_3d(const EncodePoint& a, const EncodePoint& b, QualityMetric metric);

// Minimise m, maximise v; weak dominance with at least one strict inequality.
bool dominates_mv(const ObjectiveVector& a, const ObjectiveVector& b);

enum class ObjectiveSpace { MV, TBV };

struct FrontMember {
    EncodePoint point;
    double quality = 0.0;
    // Composite metric; only meaningful for MV fronts.
    std::optional<double> m;
};

struct ParetoFront {
    ObjectiveSpace space = ObjectiveSpace::MV;
    std::optional<Alpha> alpha;
    QualityMetric metric = QualityMetric::Xpsnr;
    std::vector<FrontMember> members;

    bool contains(int resolution, int qp) const;
};

// Non-dominated points of `set` in (m, v). Members are ordered by strictly
// increasing m and v. Points with identical (m, v) collapse to the one with
// lower QP, then lower resolution. Throws DataError on an empty set or a
// missing metric.
ParetoFront pareto_front_mv(const MeasurementSet& set, Alpha alpha, QualityMetric metric);

// Non-dominated points of `set` in (decode time, bitrate, quality), ordered
// by increasing bitrate. Identical objective vectors collapse as above.
ParetoFront pareto_front_3d(const MeasurementSet& set, QualityMetric metric);

// {"sequence", "header": {alpha, quality_metric, objective_space},
//  "points": [{resolution, qp, bitrate_kbps, decode_time_s, quality, m}]}.
// For 3-D fronts alpha and m are null.
nlohmann::json to_json(const ParetoFront& front, const std::string& sequence);

} // namespace rqt
