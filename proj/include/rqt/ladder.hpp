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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rqt/measurements.hpp"
#include "rqt/pareto.hpp"

namespace rqt {

// Rung targets in Mbps, strictly increasing and positive.
class TargetBitrateSet {
public:
    // Throws UsageError when the invariant does not hold.
    explicit TargetBitrateSet(std::vector<double> targets_mbps);

    // {0.145, 0.3, 0.6, 0.9, 1.6, 2.4, 3.4, 4.5, 5.8, 8.1, 11.6, 16.8} Mbps.
    static TargetBitrateSet defaults();

    std::span<const double> values() const { return targets_; }
    std::size_t size() const { return targets_.size(); }

private:
    std::vector<double> targets_;
};

// Parses a comma-separated list such as "0.145,0.3,1.6".
TargetBitrateSet parse_targets(std::string_view list);

enum class LadderMethod { RqtPf, QtPf, DynRes, Fixed, Default };

struct MethodTag {
    LadderMethod kind = LadderMethod::RqtPf;
    std::optional<Alpha> alpha;  // only for RqtPf

    // CLI spelling: rqt-pf, qt-pf, dynres, fixed, default.
    std::string cli_name() const;
    // Row label, e.g. "RQT-PF (alpha=0.75)" or "DynResXPSNR".
    std::string label() const;
    // File-name friendly key, e.g. "rqt-pf-0.75".
    std::string key() const;

    bool operator==(const MethodTag&) const = default;
};

// Parses the CLI spelling; alpha must be given iff the method is rqt-pf.
MethodTag parse_method(std::string_view name, std::optional<double> alpha);

struct LadderRung {
    double target_mbps = 0.0;
    std::optional<EncodePoint> selected;

    bool present() const { return selected.has_value(); }
    // Present and within the rung's bandwidth budget.
    bool feasible() const;

    bool operator==(const LadderRung&) const = default;
};

struct Ladder {
    MethodTag method;
    QualityMetric metric = QualityMetric::Xpsnr;
    std::string sequence;
    std::vector<LadderRung> rungs;

    std::size_t present_count() const;

    bool operator==(const Ladder&) const = default;
};

struct FixedLadderSpec {
    struct Entry {
        double target_mbps = 0.0;
        int resolution = 0;
        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    // HLS-authoring-style pairing of the default targets with resolutions.
    static FixedLadderSpec defaults();

    // Throws UsageError unless targets strictly increase and every
    // resolution belongs to `grid`.
    void validate(const Grid& grid) const;

    bool operator==(const FixedLadderSpec&) const = default;
};

inline constexpr std::string_view kFixedSpecHeader = "target_mbps,resolution";

FixedLadderSpec parse_fixed_spec(std::istream& in);
void write_fixed_spec(std::ostream& out, const FixedLadderSpec& spec);

// Samples the (M, v) front: per target, the highest-quality front member
// whose bitrate fits the target, followed by the monotonicity pass.
Ladder build_rqt_pf_ladder(const MeasurementSet& set, Alpha alpha, QualityMetric metric,
                           const TargetBitrateSet& targets);

// The alpha = 1 limit: decode time and quality only.
Ladder build_qt_pf_ladder(const MeasurementSet& set, QualityMetric metric, const TargetBitrateSet& targets);

// Per target, the feasible point with maximum XPSNR over all resolutions.
Ladder build_dynres_ladder(const MeasurementSet& set, const TargetBitrateSet& targets);

// Per target, the best feasible point at the sequence's native resolution.
Ladder build_default_ladder(const MeasurementSet& set, QualityMetric metric, const TargetBitrateSet& targets);

// Per (target, resolution) entry, the highest-bitrate point at that
// resolution that fits; if none fits, the lowest-bitrate point at that
// resolution (reported as not feasible). `metric` only labels the ladder.
Ladder build_fixed_ladder(const MeasurementSet& set, const FixedLadderSpec& spec,
                          QualityMetric metric = QualityMetric::Xpsnr);

nlohmann::json to_json(const Ladder& ladder);
Ladder ladder_from_json(const nlohmann::json& j);

} // namespace rqt
