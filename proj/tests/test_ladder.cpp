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

#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "rqt/errors.hpp"
#include "rqt/ladder.hpp"

using namespace rqt;

namespace {

EncodePoint point(int r, int q, double mbps, double t, double v) {
    return EncodePoint{"s", r, q, mbps * 1000.0, t, v - 1.0, v, std::min(100.0, 2.0 * v)};
}

MeasurementSet set_of(std::vector<EncodePoint> points, int native = 2160) {
    MeasurementSet s(SequenceId{"s", native, std::nullopt, std::nullopt});
    for (auto& p : points) s.add(std::move(p));
    return s;
}

std::optional<oracle::Key> key_of(const LadderRung& r) {
    if (!r.selected) return std::nullopt;
    return oracle::Key{r.selected->resolution, r.selected->qp};
}

// Exhaustive max-quality feasible selection with the documented tie order.
std::optional<oracle::Key> exhaustive_pick(const MeasurementSet& set, double target_mbps, QualityMetric metric,
                                           const std::function<bool(const EncodePoint&)>& allowed) {
    const EncodePoint* best = nullptr;
    for (const auto& p : set.points()) {
        if (!allowed(p) || p.bitrate_kbps > target_mbps * 1000.0) continue;
        if (!best) {
            best = &p;
            continue;
        }
        auto rank = [&](const EncodePoint& x) {
            return std::make_tuple(-x.require_quality(metric), x.decode_time_s, x.bitrate_kbps, x.qp, x.resolution);
        };
        if (rank(p) < rank(*best)) best = &p;
    }
    if (!best) return std::nullopt;
    return oracle::Key{best->resolution, best->qp};
}

void check_monotone(const Ladder& l) {
    const EncodePoint* prev = nullptr;
    for (const auto& r : l.rungs) {
        if (!r.selected) {
            CHECK(prev == nullptr);  // absent rungs only below the first present one
            continue;
        }
        if (prev) {
            CHECK(r.selected->require_quality(l.metric) >= prev->require_quality(l.metric));
            CHECK(r.selected->bitrate_kbps >= prev->bitrate_kbps);
        }
        prev = &*r.selected;
    }
}

} // namespace

TEST_CASE("target bitrate set") {
    auto d = TargetBitrateSet::defaults();
    REQUIRE(d.size() == 12);
    const double table[] = {0.145, 0.3, 0.6, 0.9, 1.6, 2.4, 3.4, 4.5, 5.8, 8.1, 11.6, 16.8};
    for (std::size_t i = 0; i < 12; ++i) CHECK(d.values()[i] == table[i]);
    CHECK_THROWS_AS(TargetBitrateSet({1.0, 1.0}), UsageError);
    CHECK_THROWS_AS(TargetBitrateSet({0.0, 1.0}), UsageError);
    CHECK_THROWS_AS(TargetBitrateSet({}), UsageError);
    CHECK(parse_targets("0.145, 0.3,1.6").size() == 3);
    CHECK_THROWS_AS(parse_targets("0.3,abc"), UsageError);
}

TEST_CASE("method tags") {
    auto m = parse_method("rqt-pf", 0.75);
    CHECK(m.label() == "RQT-PF (alpha=0.75)");
    CHECK(m.key() == "rqt-pf-0.75");
    CHECK(parse_method("dynres", std::nullopt).label() == "DynResXPSNR");
    CHECK(parse_method("qt-pf", std::nullopt).label() == "QT-PF");
    CHECK(parse_method("fixed", std::nullopt).label() == "FixedLadder");
    CHECK(parse_method("default", std::nullopt).label() == "Default");
    CHECK_THROWS_AS(parse_method("rqt-pf", std::nullopt), UsageError);
    CHECK_THROWS_AS(parse_method("dynres", 0.5), UsageError);
    CHECK_THROWS_AS(parse_method("hls", std::nullopt), UsageError);
    CHECK_THROWS_AS(parse_method("rqt-pf", 1.5), UsageError);
}

TEST_CASE("RQT-PF samples the front per target") {
    // alpha = 0 keeps every point of this staircase on the front.
    auto s = set_of({point(360, 40, 0.1, 1, 30), point(720, 30, 0.5, 2, 35), point(1080, 20, 2.0, 3, 40)});
    auto l = build_rqt_pf_ladder(s, Alpha(0.0), QualityMetric::Xpsnr, TargetBitrateSet({0.145, 0.6, 2.4}));
    REQUIRE(l.rungs.size() == 3);
    CHECK(l.rungs[0].selected->bitrate_kbps == 100.0);
    CHECK(l.rungs[1].selected->bitrate_kbps == 500.0);
    CHECK(l.rungs[2].selected->bitrate_kbps == 2000.0);
    for (double t : {0.145, 0.6, 2.4}) {
        auto want = exhaustive_pick(s, t, QualityMetric::Xpsnr, [](const EncodePoint&) { return true; });
        auto got = std::find_if(l.rungs.begin(), l.rungs.end(), [&](const LadderRung& r) { return r.target_mbps == t; });
        CHECK(key_of(*got) == want);
    }

    auto low = build_rqt_pf_ladder(s, Alpha(0.5), QualityMetric::Xpsnr, TargetBitrateSet({0.05, 0.145}));
    CHECK_FALSE(low.rungs[0].present());
    CHECK(low.rungs[1].present());
}

TEST_CASE("QT-PF") {
    SUBCASE("equal quality keeps the faster point") {
        auto s = set_of({point(720, 30, 0.5, 2.0, 35), point(540, 30, 0.5, 1.0, 35)});
        auto l = build_qt_pf_ladder(s, QualityMetric::Xpsnr, TargetBitrateSet({1.0}));
        CHECK(l.rungs[0].selected->resolution == 540);
    }
    SUBCASE("fast low resolutions dominate the ladder") {
        // Decode time grows with resolution, and low resolutions reach high
        // quality at low QP, so they dominate slower high-resolution points.
        std::vector<EncodePoint> pts;
        const int res[] = {360, 540, 720, 1080, 1440, 2160};
        for (int i = 0; i < 6; ++i)
            for (int q = 10; q <= 40; q += 5) {
                const double mbps = 0.2 * std::pow(2.0, (40 - q) / 5.0) * (1.0 + 0.1 * i);
                pts.push_back(point(res[i], q, mbps, 0.5 * (i + 1) + 0.05 * mbps, 30.0 + 0.5 * (40 - q) + i));
            }
        auto s = set_of(pts);
        auto targets = TargetBitrateSet::defaults();
        auto qt = build_qt_pf_ladder(s, QualityMetric::Xpsnr, targets);
        auto front = oracle::front_mv(s, 1.0, QualityMetric::Xpsnr);
        double qt_mean = 0, dyn_mean = 0;
        auto dyn = build_dynres_ladder(s, targets);
        int n = 0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (!qt.rungs[i].present()) continue;
            CHECK(front.count(*key_of(qt.rungs[i])) == 1);
            qt_mean += qt.rungs[i].selected->resolution;
            dyn_mean += dyn.rungs[i].selected->resolution;
            ++n;
        }
        REQUIRE(n > 0);
        CHECK(qt_mean / n < dyn_mean / n);
    }
    SUBCASE("single point") {
        auto s = set_of({point(720, 30, 0.5, 2.0, 35)});
        auto l = build_qt_pf_ladder(s, QualityMetric::Xpsnr, TargetBitrateSet::defaults());
        for (const auto& r : l.rungs) CHECK(r.present() == (r.target_mbps >= 0.5));
        for (const auto& r : l.rungs)
            if (r.present()) CHECK(r.selected->qp == 30);
    }
}

TEST_CASE("DynRes") {
    auto s = set_of({point(720, 30, 1.0, 1.0, 41.0), point(1080, 30, 1.2, 2.0, 41.5)});
    auto l = build_dynres_ladder(s, TargetBitrateSet({0.5, 1.6}));
    CHECK_FALSE(l.rungs[0].present());
    CHECK(l.rungs[1].selected->resolution == 1080);

    auto tie = set_of({point(720, 30, 1.0, 1.0, 41.0), point(1080, 30, 0.9, 2.0, 41.0)});
    CHECK(build_dynres_ladder(tie, TargetBitrateSet({1.6})).rungs[0].selected->resolution == 720);

    auto missing = point(720, 30, 1.0, 1.0, 41.0);
    missing.xpsnr_db.reset();
    CHECK_THROWS_AS(build_dynres_ladder(set_of({missing}), TargetBitrateSet({1.6})), DataError);
}

TEST_CASE("Default ladder") {
    auto s = set_of({point(2160, 40, 0.4, 5, 38), point(2160, 30, 3.0, 6, 42), point(2160, 20, 12.0, 7, 45),
                     point(360, 40, 0.1, 1, 30)});
    auto l = build_default_ladder(s, QualityMetric::Xpsnr, TargetBitrateSet::defaults());
    CHECK_FALSE(l.rungs[0].present());
    CHECK(l.rungs.back().selected->qp == 20);
    for (const auto& r : l.rungs)
        if (r.present()) CHECK(r.selected->resolution == 2160);
    CHECK_THROWS_AS(build_default_ladder(set_of({point(360, 40, 0.1, 1, 30)}), QualityMetric::Xpsnr,
                                         TargetBitrateSet::defaults()),
                    DataError);
}

TEST_CASE("Fixed ladder") {
    auto s = set_of({point(720, 40, 1.8, 1, 35), point(720, 35, 2.2, 1, 36), point(720, 30, 3.0, 1, 37),
                     point(360, 40, 0.2, 1, 30), point(360, 30, 0.5, 1, 32)});
    FixedLadderSpec spec{{{0.145, 360}, {2.4, 720}}};
    auto l = build_fixed_ladder(s, spec);
    REQUIRE(l.rungs.size() == 2);
    CHECK(l.rungs[0].selected->bitrate_kbps == 200.0);
    CHECK_FALSE(l.rungs[0].feasible());
    CHECK(l.rungs[1].selected->bitrate_kbps == 2200.0);
    CHECK(l.rungs[1].feasible());

    FixedLadderSpec with1440{{{8.1, 1440}}};
    CHECK_THROWS_AS(build_fixed_ladder(s, with1440), DataError);
}

TEST_CASE("fixed ladder spec") {
    auto d = FixedLadderSpec::defaults();
    CHECK(d.entries.size() == 12);
    CHECK_NOTHROW(d.validate(Grid::defaults()));
    std::ostringstream out;
    write_fixed_spec(out, d);
    std::istringstream in(out.str());
    CHECK(parse_fixed_spec(in) == d);
    FixedLadderSpec bad{{{1.0, 720}, {0.5, 1080}}};
    CHECK_THROWS_AS(bad.validate(Grid::defaults()), UsageError);
    FixedLadderSpec odd{{{1.0, 480}}};
    CHECK_THROWS_AS(odd.validate(Grid::defaults()), UsageError);
    std::istringstream junk("target_mbps,resolution\n1.0\n");
    CHECK_THROWS(parse_fixed_spec(junk));
}

TEST_CASE("ladder invariants on random sets") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto targets = TargetBitrateSet::defaults();
    int equal_cases = 0, divergent_cases = 0, condition_held = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto s = oracle::random_set(rng, 1 + rng() % 500, trial % 4 == 0);
        const double a = unit(rng);
        for (auto metric : {QualityMetric::Xpsnr, QualityMetric::Vmaf}) {
            auto l = build_rqt_pf_ladder(s, Alpha(a), metric, targets);
            auto front = oracle::front_mv(s, a, metric);
            REQUIRE(l.rungs.size() == targets.size());
            for (std::size_t i = 0; i < targets.size(); ++i) {
                CHECK(l.rungs[i].target_mbps == targets.values()[i]);
                if (l.rungs[i].present()) {
                    CHECK(front.count(*key_of(l.rungs[i])) == 1);
                    CHECK(l.rungs[i].feasible());
                }
            }
            check_monotone(l);
            auto qt = build_qt_pf_ladder(s, metric, targets);
            auto qt_front = oracle::front_mv(s, 1.0, metric);
            for (const auto& r : qt.rungs)
                if (r.present()) CHECK(qt_front.count(*key_of(r)) == 1);
            check_monotone(qt);
        }

        // DynRes against exhaustive search.
        auto dyn = build_dynres_ladder(s, targets);
        check_monotone(dyn);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            CHECK(key_of(dyn.rungs[i]) == exhaustive_pick(s, targets.values()[i], QualityMetric::Xpsnr,
                                                          [](const EncodePoint&) { return true; }));
        }

        // Default ladder: native filter and coverage gap.
        double min_native = 1e300;
        for (const auto& p : s.points())
            if (p.resolution == 2160) min_native = std::min(min_native, p.bitrate_kbps);
        if (min_native == 1e300) {
            CHECK_THROWS_AS(build_default_ladder(s, QualityMetric::Xpsnr, targets), DataError);
        } else {
            auto def = build_default_ladder(s, QualityMetric::Xpsnr, targets);
            check_monotone(def);
            for (std::size_t i = 0; i < targets.size(); ++i) {
                if (def.rungs[i].present()) CHECK(def.rungs[i].selected->resolution == 2160);
                CHECK(key_of(def.rungs[i]) ==
                      exhaustive_pick(s, targets.values()[i], QualityMetric::Xpsnr,
                                      [](const EncodePoint& p) { return p.resolution == 2160; }));
            }
            if (min_native > targets.values()[0] * 1000.0) CHECK(def.present_count() < targets.size());
        }

        // Alpha = 0 against DynRes: equal whenever each DynRes pick lies on the (log b, v) front.
        auto a0 = build_rqt_pf_ladder(s, Alpha(0.0), QualityMetric::Xpsnr, targets);
        auto front0 = oracle::front_mv(s, 0.0, QualityMetric::Xpsnr);
        bool condition = true;
        for (const auto& r : dyn.rungs)
            if (r.present() && front0.count(*key_of(r)) == 0) condition = false;
        bool same = true;
        for (std::size_t i = 0; i < targets.size(); ++i) same = same && key_of(a0.rungs[i]) == key_of(dyn.rungs[i]);
        if (condition) {
            ++condition_held;
            CHECK(same);
        }
        (same ? equal_cases : divergent_cases) += 1;
    }
    MESSAGE("alpha=0 vs DynRes: " << equal_cases << " identical, " << divergent_cases << " divergent, condition held in "
                                  << condition_held);
    CHECK(condition_held > 0);
}

TEST_CASE("ladder JSON round trip") {
    std::mt19937_64 rng(5);
    auto s = oracle::random_set(rng, 120, false);
    auto targets = TargetBitrateSet::defaults();
    std::vector<Ladder> ladders{build_rqt_pf_ladder(s, Alpha(0.25), QualityMetric::Psnr, targets),
                                build_qt_pf_ladder(s, QualityMetric::Vmaf, targets), build_dynres_ladder(s, targets),
                                build_fixed_ladder(s, FixedLadderSpec::defaults())};
    for (const auto& l : ladders) {
        auto j = to_json(l);
        CHECK(ladder_from_json(j) == l);
        CHECK(ladder_from_json(nlohmann::json::parse(j.dump())) == l);
    }
    auto j = to_json(ladders[0]);
    CHECK(j["method"] == "rqt-pf");
    CHECK(j["alpha"] == 0.25);
    CHECK(j["quality_metric"] == "psnr");
    CHECK(j["rungs"].size() == 12);
}
