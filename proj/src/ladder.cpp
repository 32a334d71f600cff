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

#include "rqt/ladder.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "rqt/errors.hpp"
#include "rqt/text.hpp"

namespace rqt {

TargetBitrateSet::TargetBitrateSet(std::vector<double> targets_mbps) : targets_(std::move(targets_mbps)) {
    if (targets_.empty()) {
        throw UsageError("target bitrate set is empty");
    }
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        if (!(targets_[i] > 0.0)) {
            throw UsageError("target bitrates must be positive, got " + format_double(targets_[i]));
        }
        if (i > 0 && !(targets_[i] > targets_[i - 1])) {
            throw UsageError("target bitrates must be strictly increasing");
        }
    }
}

TargetBitrateSet TargetBitrateSet::defaults() {
    return TargetBitrateSet({0.145, 0.300, 0.600, 0.900, 1.600, 2.400, 3.400, 4.500, 5.800, 8.100, 11.600, 16.800});
}

TargetBitrateSet parse_targets(std::string_view list) {
    std::vector<double> values;
    for (auto field : split(list, ',')) {
        auto v = parse_double(field);
        if (!v) {
            throw UsageError("malformed target bitrate '" + std::string(field) + "'");
        }
        values.push_back(*v);
    }
    return TargetBitrateSet(std::move(values));
}

std::string MethodTag::cli_name() const {
    switch (kind) {
    case LadderMethod::RqtPf:
        return "rqt-pf";
    case LadderMethod::QtPf:
        return "qt-pf";
    case LadderMethod::DynRes:
        return "dynres";
    case LadderMethod::Fixed:
        return "fixed";
    case LadderMethod::Default:
        return "default";
    }
    return "unknown";
}

std::string MethodTag::label() const {
    switch (kind) {
    case LadderMethod::RqtPf:
        return "RQT-PF (alpha=" + format_double(alpha ? alpha->value() : 0.0) + ")";
    case LadderMethod::QtPf:
        return "QT-PF";
    case LadderMethod::DynRes:
        return "DynResXPSNR";
    case LadderMethod::Fixed:
        return "FixedLadder";
    case LadderMethod::Default:
        return "Default";
    }
    return "unknown";
}

std::string MethodTag::key() const {
    if (kind == LadderMethod::RqtPf && alpha) {
        return cli_name() + "-" + format_double(alpha->value());
    }
    return cli_name();
}

MethodTag parse_method(std::string_view name, std::optional<double> alpha) {
    MethodTag tag;
    if (name == "rqt-pf") {
        tag.kind = LadderMethod::RqtPf;
    } else if (name == "qt-pf") {
        tag.kind = LadderMethod::QtPf;
    } else if (name == "dynres") {
        tag.kind = LadderMethod::DynRes;
    } else if (name == "fixed") {
        tag.kind = LadderMethod::Fixed;
    } else if (name == "default") {
        tag.kind = LadderMethod::Default;
    } else {
        throw UsageError("unknown ladder method '" + std::string(name) +
                         "' (expected rqt-pf, qt-pf, dynres, fixed or default)");
    }
    if (tag.kind == LadderMethod::RqtPf) {
        if (!alpha) {
            throw UsageError("method rqt-pf requires --alpha");
        }
        tag.alpha = Alpha(*alpha);
    } else if (alpha) {
        throw UsageError("--alpha is only accepted with method rqt-pf");
    }
    return tag;
}

bool LadderRung::feasible() const {
    return selected && selected->bitrate_kbps <= target_mbps * 1000.0;
}

std::size_t Ladder::present_count() const {
    return static_cast<std::size_t>(
        std::count_if(rungs.begin(), rungs.end(), [](const LadderRung& r) { return r.present(); }));
}

FixedLadderSpec FixedLadderSpec::defaults() {
    return FixedLadderSpec{{{0.145, 360},
                            {0.300, 360},
                            {0.600, 540},
                            {0.900, 540},
                            {1.600, 540},
                            {2.400, 720},
                            {3.400, 720},
                            {4.500, 1080},
                            {5.800, 1080},
                            {8.100, 1440},
                            {11.600, 2160},
                            {16.800, 2160}}};
}

void FixedLadderSpec::validate(const Grid& grid) const {
    if (entries.empty()) {
        throw UsageError("fixed ladder specification is empty");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i].target_mbps > 0.0)) {
            throw UsageError("fixed ladder targets must be positive");
        }
        if (i > 0 && !(entries[i].target_mbps > entries[i - 1].target_mbps)) {
            throw UsageError("fixed ladder targets must be strictly increasing");
        }
        if (!grid.has_resolution(entries[i].resolution)) {
            throw UsageError("fixed ladder resolution " + std::to_string(entries[i].resolution) +
                             " is not in the configured resolution set");
        }
    }
}

FixedLadderSpec parse_fixed_spec(std::istream& in) {
    FixedLadderSpec spec;
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        auto view = trim(line);
        if (view.empty()) continue;
        if (!header) {
            if (view != kFixedSpecHeader) {
                throw UsageError("line " + std::to_string(number) + ": expected header '" +
                                 std::string(kFixedSpecHeader) + "'");
            }
            header = true;
            continue;
        }
        auto fields = split(view, ',');
        std::optional<double> t;
        std::optional<long long> r;
        if (fields.size() == 2) {
            t = parse_double(fields[0]);
            r = parse_int(fields[1]);
        }
        if (!t || !r) {
            throw UsageError("line " + std::to_string(number) + ": malformed fixed ladder entry");
        }
        spec.entries.push_back({*t, static_cast<int>(*r)});
    }
    if (!header) {
        throw UsageError("fixed ladder file is missing its header");
    }
    return spec;
}

void write_fixed_spec(std::ostream& out, const FixedLadderSpec& spec) {
    out << kFixedSpecHeader << '\n';
    for (const auto& e : spec.entries) {
        out << format_double(e.target_mbps) << ',' << e.resolution << '\n';
    }
}

namespace {

// Strict preference at equal quality: lower decode time, bitrate, QP, resolution.
bool preferred_on_tie(const EncodePoint& a, const EncodePoint& b) {
    if (a.decode_time_s != b.decode_time_s) return a.decode_time_s < b.decode_time_s;
    if (a.bitrate_kbps != b.bitrate_kbps) return a.bitrate_kbps < b.bitrate_kbps;
    if (a.qp != b.qp) return a.qp < b.qp;
    return a.resolution < b.resolution;
}

// Highest-quality candidate whose bitrate fits the target.
const EncodePoint* best_feasible(std::span<const EncodePoint* const> candidates, double target_mbps,
                                 QualityMetric metric) {
    const EncodePoint* best = nullptr;
    double best_v = 0.0;
    for (const EncodePoint* p : candidates) {
        if (!(p->bitrate_kbps <= target_mbps * 1000.0)) continue;
        const double v = p->require_quality(metric);
        if (!best || v > best_v || (v == best_v && preferred_on_tie(*p, *best))) {
            best = p;
            best_v = v;
        }
    }
    return best;
}

// Ensures quality and bitrate never decrease with the target: a rung whose
// selection would step down reuses the previous rung's point.
void enforce_monotone(Ladder& ladder) {
    const EncodePoint* prev = nullptr;
    for (auto& rung : ladder.rungs) {
        if (!rung.selected) continue;
        if (prev) {
            const double v = rung.selected->require_quality(ladder.metric);
            const double pv = prev->require_quality(ladder.metric);
            if (v < pv || rung.selected->bitrate_kbps < prev->bitrate_kbps) {
                rung.selected = *prev;
            }
        }
        prev = &*rung.selected;
    }
}

Ladder sample(const MeasurementSet& set, MethodTag method, QualityMetric metric,
              std::span<const EncodePoint* const> candidates, const TargetBitrateSet& targets) {
    Ladder ladder{std::move(method), metric, set.sequence().name, {}};
    ladder.rungs.reserve(targets.size());
    for (double t : targets.values()) {
        LadderRung rung{t, std::nullopt};
        if (const EncodePoint* p = best_feasible(candidates, t, metric)) {
            rung.selected = *p;
        }
        ladder.rungs.push_back(std::move(rung));
    }
    enforce_monotone(ladder);
    return ladder;
}

Ladder sample_front(const MeasurementSet& set, MethodTag method, Alpha alpha, QualityMetric metric,
                    const TargetBitrateSet& targets) {
    const ParetoFront front = pareto_front_mv(set, alpha, metric);
    std::vector<const EncodePoint*> candidates;
    candidates.reserve(front.members.size());
    for (const auto& m : front.members) {
        candidates.push_back(&m.point);
    }
    return sample(set, std::move(method), metric, candidates, targets);
}

} // namespace

Ladder build_rqt_pf_ladder(const MeasurementSet& set, Alpha alpha, QualityMetric metric,
                           const TargetBitrateSet& targets) {
    return sample_front(set, MethodTag{LadderMethod::RqtPf, alpha}, alpha, metric, targets);
}

Ladder build_qt_pf_ladder(const MeasurementSet& set, QualityMetric metric, const TargetBitrateSet& targets) {
    return sample_front(set, MethodTag{LadderMethod::QtPf, std::nullopt}, Alpha(1.0), metric, targets);
}

Ladder build_dynres_ladder(const MeasurementSet& set, const TargetBitrateSet& targets) {
    std::vector<const EncodePoint*> candidates;
    for (const auto& p : set.points()) {
        p.require_quality(QualityMetric::Xpsnr);
        candidates.push_back(&p);
    }
    return sample(set, MethodTag{LadderMethod::DynRes, std::nullopt}, QualityMetric::Xpsnr, candidates, targets);
}

Ladder build_default_ladder(const MeasurementSet& set, QualityMetric metric, const TargetBitrateSet& targets) {
    const int native = set.sequence().native_resolution;
    std::vector<const EncodePoint*> candidates;
    for (const auto& p : set.points()) {
        if (p.resolution == native) {
            candidates.push_back(&p);
        }
    }
    if (candidates.empty()) {
        throw DataError("sequence '" + set.sequence().name + "' has no points at its native resolution " +
                        std::to_string(native));
    }
    return sample(set, MethodTag{LadderMethod::Default, std::nullopt}, metric, candidates, targets);
}

Ladder build_fixed_ladder(const MeasurementSet& set, const FixedLadderSpec& spec, QualityMetric metric) {
    Ladder ladder{MethodTag{LadderMethod::Fixed, std::nullopt}, metric, set.sequence().name, {}};
    for (const auto& entry : spec.entries) {
        const EncodePoint* fit = nullptr;
        const EncodePoint* lowest = nullptr;
        for (const auto& p : set.points()) {
            if (p.resolution != entry.resolution) continue;
            if (!lowest || p.bitrate_kbps < lowest->bitrate_kbps ||
                (p.bitrate_kbps == lowest->bitrate_kbps && p.qp > lowest->qp)) {
                lowest = &p;
            }
            if (p.bitrate_kbps <= entry.target_mbps * 1000.0 &&
                (!fit || p.bitrate_kbps > fit->bitrate_kbps ||
                 (p.bitrate_kbps == fit->bitrate_kbps && p.qp < fit->qp))) {
                fit = &p;
            }
        }
        if (!lowest) {
            throw DataError("sequence '" + set.sequence().name + "' has no points at resolution " +
                            std::to_string(entry.resolution) + " required by the fixed ladder");
        }
        ladder.rungs.push_back({entry.target_mbps, fit ? *fit : *lowest});
    }
    return ladder;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

nlohmann::json to_json(const Ladder& ladder) {
    nlohmann::json j;
    j["method"] = ladder.method.cli_name();
    if (ladder.method.alpha) {
        j["alpha"] = ladder.method.alpha->value();
    }
    j["quality_metric"] = std::string(to_string(ladder.metric));
    j["sequence"] = ladder.sequence;
    auto rungs = nlohmann::json::array();
    for (const auto& rung : ladder.rungs) {
        nlohmann::json r;
        r["target_mbps"] = rung.target_mbps;
        if (rung.selected) {
            const auto& p = *rung.selected;
            r["resolution"] = p.resolution;
            r["qp"] = p.qp;
            r["bitrate_kbps"] = p.bitrate_kbps;
            r["decode_time_s"] = p.decode_time_s;
            r["psnr_db"] = optional_json(p.psnr_db);
            r["xpsnr_db"] = optional_json(p.xpsnr_db);
            r["vmaf"] = optional_json(p.vmaf);
        } else {
            for (const char* key :
                 {"resolution", "qp", "bitrate_kbps", "decode_time_s", "psnr_db", "xpsnr_db", "vmaf"}) {
                r[key] = nullptr;
            }
        }
        r["feasible"] = rung.feasible();
        rungs.push_back(std::move(r));
    }
    j["rungs"] = std::move(rungs);
    return j;
}

Ladder ladder_from_json(const nlohmann::json& j) {
    try {
        Ladder ladder;
        std::optional<double> alpha;
        if (j.contains("alpha") && !j.at("alpha").is_null()) {
            alpha = j.at("alpha").get<double>();
        }
        ladder.method = parse_method(j.at("method").get<std::string>(), alpha);
        ladder.metric = parse_quality_metric(j.at("quality_metric").get<std::string>());
        ladder.sequence = j.at("sequence").get<std::string>();
        for (const auto& r : j.at("rungs")) {
            LadderRung rung;
            rung.target_mbps = r.at("target_mbps").get<double>();
            if (r.contains("resolution") && !r.at("resolution").is_null()) {
                EncodePoint p;
                p.sequence = ladder.sequence;
                p.resolution = r.at("resolution").get<int>();
                p.qp = r.at("qp").get<int>();
                p.bitrate_kbps = r.at("bitrate_kbps").get<double>();
                p.decode_time_s = r.at("decode_time_s").get<double>();
                p.psnr_db = optional_from(r, "psnr_db");
                p.xpsnr_db = optional_from(r, "xpsnr_db");
                p.vmaf = optional_from(r, "vmaf");
                rung.selected = std::move(p);
            }
            ladder.rungs.push_back(std::move(rung));
        }
        return ladder;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed ladder JSON: ") + e.what());
    }
}

} // namespace rqt
