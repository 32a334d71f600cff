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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rqt/errors.hpp"
#include "rqt/pareto.hpp"

using namespace rqt;

namespace {

EncodePoint point(int r, int q, double b, double t, double v) {
    return EncodePoint{"s", r, q, b, t, std::nullopt, v, std::nullopt};
}

MeasurementSet set_of(std::vector<EncodePoint> points) {
    MeasurementSet s(SequenceId{"s", 2160, std::nullopt, std::nullopt});
    for (auto& p : points) s.add(std::move(p));
    return s;
}

std::set<oracle::Key> keys(const ParetoFront& f) {
    std::set<oracle::Key> out;
    for (const auto& m : f.members) out.insert({m.point.resolution, m.point.qp});
    return out;
}

} // namespace

TEST_CASE("composite metric") {
    CHECK(composite_metric(point(720, 30, 10000.0, 100.0, 40), Alpha(0.5)) == 3.0);
    auto p = point(720, 30, 1234.5, 6.789, 40);
    CHECK(composite_metric(p, Alpha(0.0)) == std::log10(1234.5));
    CHECK(composite_metric(p, Alpha(1.0)) == std::log10(6.789));
}

TEST_CASE("alpha must lie in the unit interval") {
    CHECK_THROWS_AS(Alpha(1.5), UsageError);
    CHECK_THROWS_AS(Alpha(-0.01), UsageError);
    CHECK_THROWS_AS(Alpha(std::nan("")), UsageError);
    CHECK(Alpha(0.75).value() == 0.75);
}

TEST_CASE("three-objective dominance") {
    const auto metric = QualityMetric::Xpsnr;
    CHECK(dominates_3d(point(360, 10, 100, 1, 40), point(360, 12, 200, 2, 39), metric));
    CHECK_FALSE(dominates_3d(point(360, 10, 100, 1, 40), point(360, 10, 100, 1, 40), metric));
    CHECK_FALSE(dominates_3d(point(360, 10, 300, 1, 40), point(360, 12, 200, 2, 39), metric));
    CHECK(dominates_3d(point(360, 10, 100, 1, 40), point(360, 12, 100, 1, 39), metric));
    auto no_quality = point(360, 10, 100, 1, 40);
    no_quality.xpsnr_db.reset();
    no_quality.psnr_db = 30.0;
    CHECK_THROWS_AS(dominates_3d(no_quality, point(360, 12, 200, 2, 39), metric), DataError);
}

TEST_CASE("reduced-space dominance") {
    CHECK(dominates_mv({1.0, 40, 0}, {1.5, 39, 1}));
    CHECK_FALSE(dominates_mv({1.0, 39, 0}, {1.5, 40, 1}));
    CHECK_FALSE(dominates_mv({1.0, 40, 0}, {1.0, 40, 1}));
}

TEST_CASE("MV front of three points") {
    // alpha = 0 makes m = log10(bitrate), so bitrates 10, 100, 1000 give m = 1, 2, 3.
    auto s = set_of({point(360, 10, 10, 1, 30), point(540, 10, 100, 1, 40), point(720, 10, 1000, 1, 35)});
    auto f = pareto_front_mv(s, Alpha(0.0), QualityMetric::Xpsnr);
    REQUIRE(f.members.size() == 2);
    CHECK(f.members[0].point.resolution == 360);
    CHECK(*f.members[0].m == 1.0);
    CHECK(f.members[1].point.resolution == 540);
    CHECK(*f.members[1].m == 2.0);
    CHECK(keys(f) == oracle::front_mv(s, 0.0, QualityMetric::Xpsnr));
}

TEST_CASE("identical objective vectors collapse to the lowest QP then resolution") {
    auto s = set_of({point(720, 30, 100, 1, 40), point(360, 30, 100, 1, 40), point(1080, 20, 100, 1, 40)});
    auto mv = pareto_front_mv(s, Alpha(0.3), QualityMetric::Xpsnr);
    REQUIRE(mv.members.size() == 1);
    CHECK(mv.members[0].point.qp == 20);
    auto td = pareto_front_3d(s, QualityMetric::Xpsnr);
    REQUIRE(td.members.size() == 1);
    CHECK(td.members[0].point.qp == 20);

    auto s2 = set_of({point(720, 30, 100, 1, 40), point(360, 30, 100, 1, 40)});
    CHECK(pareto_front_mv(s2, Alpha(0.3), QualityMetric::Xpsnr).members[0].point.resolution == 360);
}

TEST_CASE("single point and empty sets") {
    auto s = set_of({point(720, 30, 100, 1, 40)});
    CHECK(pareto_front_mv(s, Alpha(0.5), QualityMetric::Xpsnr).members.size() == 1);
    CHECK(pareto_front_3d(s, QualityMetric::Xpsnr).members.size() == 1);
    MeasurementSet empty(SequenceId{"e", 2160, std::nullopt, std::nullopt});
    CHECK_THROWS_AS(pareto_front_mv(empty, Alpha(0.5), QualityMetric::Xpsnr), DataError);
    CHECK_THROWS_AS(pareto_front_3d(empty, QualityMetric::Xpsnr), DataError);
}

TEST_CASE("3D front examples") {
    auto base = std::vector<EncodePoint>{point(360, 10, 100, 1, 30), point(540, 10, 50, 2, 30),
                                         point(720, 10, 200, 3, 50)};
    auto s = set_of(base);
    auto f = pareto_front_3d(s, QualityMetric::Xpsnr);
    CHECK(f.members.size() == 3);
    CHECK(keys(f) == oracle::front_3d(s, QualityMetric::Xpsnr));
    // Ordered by bitrate.
    CHECK(f.members[0].point.bitrate_kbps == 50);

    base.push_back(point(1080, 10, 300, 4, 29));
    auto s2 = set_of(base);
    auto f2 = pareto_front_3d(s2, QualityMetric::Xpsnr);
    CHECK(f2.members.size() == 3);
    CHECK_FALSE(f2.contains(1080, 10));
}

TEST_CASE("MV front is a strictly increasing staircase") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = oracle::random_set(rng, 1 + rng() % 150, trial % 3 == 0);
        auto f = pareto_front_mv(s, Alpha(std::uniform_real_distribution<double>(0, 1)(rng)), QualityMetric::Xpsnr);
        for (std::size_t i = 1; i < f.members.size(); ++i) {
            CHECK(*f.members[i].m > *f.members[i - 1].m);
            CHECK(f.members[i].quality > f.members[i - 1].quality);
        }
    }
}

TEST_CASE("front properties on random sets") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto metric = QualityMetric::Xpsnr;
    for (int trial = 0; trial < 150; ++trial) {
        const bool coarse = trial % 2 == 1;
        auto s = oracle::random_set(rng, 1 + rng() % 200, coarse);
        const double a = unit(rng);
        auto mv = pareto_front_mv(s, Alpha(a), metric);
        auto td = pareto_front_3d(s, metric);

        // Oracle equivalence.
        CHECK(keys(mv) == oracle::front_mv(s, a, metric));
        CHECK(keys(td) == oracle::front_3d(s, metric));

        // Idempotence.
        MeasurementSet mv_only(s.sequence());
        for (const auto& m : mv.members) mv_only.add(m.point);
        CHECK(keys(pareto_front_mv(mv_only, Alpha(a), metric)) == keys(mv));
        MeasurementSet td_only(s.sequence());
        for (const auto& m : td.members) td_only.add(m.point);
        CHECK(keys(pareto_front_3d(td_only, metric)) == keys(td));

        // Removing a non-member leaves the front unchanged.
        for (const auto& p : s.points()) {
            if (mv.contains(p.resolution, p.qp)) continue;
            MeasurementSet reduced(s.sequence());
            for (const auto& q : s.points())
                if (!(q.resolution == p.resolution && q.qp == p.qp)) reduced.add(q);
            CHECK(keys(pareto_front_mv(reduced, Alpha(a), metric)) == keys(mv));
            break;
        }

        // MV-nondominated implies 3D-nondominated, up to the duplicate representative.
        if (!coarse) {
            for (const auto& m : mv.members) CHECK(td.contains(m.point.resolution, m.point.qp));
        }

        // Alpha limits coincide with fronts on raw bitrate / decode time.
        CHECK(keys(pareto_front_mv(s, Alpha(0.0), metric)) ==
              oracle::front_by(s, metric, [](const EncodePoint& p) { return p.bitrate_kbps; }));
        CHECK(keys(pareto_front_mv(s, Alpha(1.0), metric)) ==
              oracle::front_by(s, metric, [](const EncodePoint& p) { return p.decode_time_s; }));

        // Scaling decode times by a power of two shifts every m by alpha*log10(c).
        MeasurementSet scaled(s.sequence());
        for (auto p : s.points()) {
            p.decode_time_s *= 4.0;
            scaled.add(p);
        }
        auto mv_scaled = pareto_front_mv(scaled, Alpha(a), metric);
        if (!coarse) {
            CHECK(keys(mv_scaled) == keys(mv));
        }
        CHECK(keys(mv_scaled) == oracle::front_mv(scaled, a, metric));
    }
}
