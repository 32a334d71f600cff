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
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "rqt/evaluation.hpp"

using namespace rqt;

namespace {

RateQualityCurve curve(std::vector<std::pair<double, double>> rate_kbps_quality) {
    RateQualityCurve c;
    for (auto [b, v] : rate_kbps_quality) c.samples.emplace_back(std::log10(b), v);
    return c;
}

RateQualityCurve from_log(const std::vector<std::pair<double, double>>& samples) {
    return RateQualityCurve{samples};
}

Ladder ladder_with_times(std::vector<double> times, const std::string& seq = "s") {
    Ladder l{MethodTag{LadderMethod::Fixed, std::nullopt}, QualityMetric::Xpsnr, seq, {}};
    double target = 1.0;
    for (double t : times) {
        const double kbps = target * 900.0;
        l.rungs.push_back({target, EncodePoint{seq, 720, 30, kbps, t, 30.0 + target, 31.0 + target, 50.0 + target}});
        target += 1.0;
    }
    return l;
}

} // namespace

TEST_CASE("monotone cubic basics") {
    MonotoneCubic two({0.0, 2.0}, {1.0, 5.0});
    CHECK(two(1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(two.integrate(0.0, 2.0) == doctest::Approx(6.0).epsilon(1e-15));

    // Linear data are reproduced exactly by the shape-preserving slopes.
    MonotoneCubic line({0.0, 1.0, 3.0, 4.0, 7.0}, {1.0, 3.0, 7.0, 9.0, 15.0});
    for (double x = 0.0; x <= 7.0; x += 0.125) CHECK(line(x) == doctest::Approx(1.0 + 2.0 * x).epsilon(1e-12));
    CHECK(line.integrate(0.0, 7.0) == doctest::Approx(7.0 + 49.0).epsilon(1e-12));

    CHECK_THROWS_AS(MonotoneCubic({0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(MonotoneCubic({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(MonotoneCubic({0.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("monotone cubic interpolates, never overshoots and integrates exactly") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> step(0.01, 2.0);
    std::uniform_real_distribution<double> jump(-1.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 11);
        std::vector<double> x{0.0}, y{0.0};
        for (int i = 1; i < n; ++i) {
            x.push_back(x.back() + step(rng));
            y.push_back(y.back() + (trial % 2 ? std::abs(jump(rng)) : jump(rng)));
        }
        MonotoneCubic f(x, y);
        for (int i = 0; i < n; ++i) CHECK(f(x[i]) == doctest::Approx(y[i]).epsilon(1e-12));
        for (int i = 0; i + 1 < n; ++i) {
            const double lo = std::min(y[i], y[i + 1]) - 1e-12, hi = std::max(y[i], y[i + 1]) + 1e-12;
            double prev = f(x[i]);
            for (int k = 1; k <= 64; ++k) {
                const double v = f(x[i] + (x[i + 1] - x[i]) * k / 64.0);
                CHECK(v >= lo);
                CHECK(v <= hi);
                if (y[i + 1] >= y[i]) CHECK(v >= prev - 1e-12);
                else CHECK(v <= prev + 1e-12);
                prev = v;
            }
        }
        const double a = x.front() + 0.3 * (x.back() - x.front());
        const double b = x.back() - 0.1 * (x.back() - x.front());
        CHECK(f.integrate(a, b) ==
              doctest::Approx(oracle::trapezoid([&](double t) { return f(t); }, a, b, 100000)).epsilon(1e-9));
    }
}

TEST_CASE("BD analytic cases") {
    auto ref = curve({{500, 32}, {1000, 35}, {2000, 38}, {4000, 40}});
    CHECK(bd_rate(ref, ref) == 0.0);
    CHECK(bd_quality(ref, ref) == 0.0);

    for (double k : {2.0, 0.5, 1.37}) {
        RateQualityCurve scaled;
        for (auto [r, v] : ref.samples) scaled.samples.emplace_back(r + std::log10(k), v);
        CHECK(std::abs(bd_rate(scaled, ref) - (k - 1.0) * 100.0) < 1e-9);
    }
    RateQualityCurve better;
    for (auto [r, v] : ref.samples) better.samples.emplace_back(r, v + 1.0);
    CHECK(std::abs(bd_quality(better, ref) - 1.0) < 1e-9);
}

TEST_CASE("BD errors") {
    auto ref = curve({{500, 32}, {1000, 35}});
    CHECK_THROWS_AS(bd_rate(curve({{500, 32}}), ref), BdError);
    auto high = curve({{5000, 40}, {9000, 45}});
    try {
        bd_rate(high, ref);
        FAIL("expected no overlap");
    } catch (const BdError& e) {
        CHECK(e.reason() == BdError::Reason::NoOverlap);
    }
    try {
        bd_quality(curve({{500, 32}, {500, 33}}), ref);
        FAIL("expected insufficient samples");
    } catch (const BdError& e) {
        CHECK(e.reason() == BdError::Reason::InsufficientSamples);
    }
}

TEST_CASE("BD against the trapezoid oracle") {
    std::mt19937_64 rng(4242);
    int tested = 0;
    while (tested < 200) {
        auto m = from_log(oracle::random_monotone_curve(rng, 4 + static_cast<int>(rng() % 9)));
        auto r = from_log(oracle::random_monotone_curve(rng, 4 + static_cast<int>(rng() % 9)));
        double rate = 0.0, quality = 0.0;
        try {
            rate = bd_rate(m, r);
            quality = bd_quality(m, r);
        } catch (const BdError&) {
            continue;
        }
        CHECK(std::abs(rate - oracle::bd_rate_trapezoid(rate_interpolant(m), rate_interpolant(r), 100000)) < 0.01);
        CHECK(std::abs(quality - oracle::bd_quality_trapezoid(quality_interpolant(m), quality_interpolant(r),
                                                              100000)) < 0.001);
        // Antisymmetry on the shared overlap.
        CHECK((1.0 + rate / 100.0) * (1.0 + bd_rate(r, m) / 100.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(quality == doctest::Approx(-bd_quality(r, m)).epsilon(1e-12));
        ++tested;
    }
}

TEST_CASE("BD-rate ignores samples appended outside the overlap") {
    // Appending a knot changes the end slope of the old last knot, so the
    // property is checked where that knot's left neighbour already lies
    // beyond the overlap.
    std::mt19937_64 rng(77);
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 100; ++trial) {
        auto ms = oracle::random_monotone_curve(rng, 6 + static_cast<int>(rng() % 5));
        auto rs = oracle::random_monotone_curve(rng, 4);
        auto m = from_log(ms), r = from_log(rs);
        double base = 0.0;
        try {
            base = bd_rate(m, r);
        } catch (const BdError&) {
            continue;
        }
        const double hi = std::min(ms.back().second, rs.back().second);
        if (ms[ms.size() - 2].second < hi) continue;
        auto extended = ms;
        extended.emplace_back(ms.back().first + 0.2, ms.back().second + 1.5);
        CHECK(bd_rate(from_log(extended), r) == doctest::Approx(base).epsilon(1e-12));
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("curves from ladders") {
    auto l = ladder_with_times({1, 2, 3});
    l.rungs.push_back(l.rungs.back());
    l.rungs.back().target_mbps = 10.0;
    l.rungs.push_back({20.0, std::nullopt});
    auto c = RateQualityCurve::from_ladder(l, QualityMetric::Xpsnr);
    CHECK(c.samples.size() == 3);
    l.rungs[0].selected->vmaf.reset();
    CHECK_THROWS_AS(RateQualityCurve::from_ladder(l, QualityMetric::Vmaf), DataError);
}

TEST_CASE("decode time delta") {
    CHECK(delta_decode_time(ladder_with_times({30, 50}), ladder_with_times({40, 60})) == -20.0);
    CHECK(delta_decode_time(ladder_with_times({1, 2, 3}), ladder_with_times({2, 2, 2})) == 0.0);
    auto l = ladder_with_times({1.5, 2.5, 7});
    CHECK(delta_decode_time(l, l) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> a{t(rng), t(rng), t(rng)}, b{t(rng), t(rng)};
        const double base = delta_decode_time(ladder_with_times(a), ladder_with_times(b));
        for (auto& x : a) x *= 8.0;
        for (auto& x : b) x *= 8.0;
        CHECK(delta_decode_time(ladder_with_times(a), ladder_with_times(b)) == doctest::Approx(base).epsilon(1e-12));
    }

    CHECK_THROWS_AS(delta_decode_time(ladder_with_times({1}, "a"), ladder_with_times({1}, "b")), DataError);
    Ladder empty{MethodTag{LadderMethod::Fixed, std::nullopt}, QualityMetric::Xpsnr, "s", {{1.0, std::nullopt}}};
    CHECK_THROWS_AS(delta_decode_time(empty, ladder_with_times({1})), DataError);
}

TEST_CASE("comparison reports") {
    auto ref = ladder_with_times({1, 2, 3, 4});
    auto same = compare_ladders(ref, ref);
    for (ReportColumn c : kReportColumns) CHECK(*same.at(c).value == 0.0);
    CHECK(same.sequences_included == 1);
    CHECK(same.skipped.empty());

    // A method covering only the lowest rung cannot be compared by BD.
    Ladder narrow = ref;
    narrow.method = MethodTag{LadderMethod::Default, std::nullopt};
    for (std::size_t i = 1; i < narrow.rungs.size(); ++i) narrow.rungs[i].selected.reset();
    auto r = compare_ladders(narrow, ref);
    CHECK_FALSE(r.at(ReportColumn::BdrX).value);
    CHECK(r.at(ReportColumn::DeltaTd).value);
    CHECK(r.sequences_included == 0);
    CHECK(r.skipped.size() == 6);
    CHECK(r.skipped[0].reason == "fewer than two distinct samples");

    // Shifted quality range with no overlap.
    Ladder high = ref;
    for (auto& rung : high.rungs) *rung.selected->xpsnr_db += 100.0;
    auto h = compare_ladders(high, ref);
    CHECK_FALSE(h.at(ReportColumn::BdrX).value);
    CHECK(h.at(ReportColumn::BdXpsnr).value);
    bool found = false;
    for (const auto& s : h.skipped) found = found || (s.column == "BDR_X" && s.reason == "no quality overlap");
    CHECK(found);

    auto j = to_json(r);
    CHECK(j["columns"]["BDR_X"]["value"].is_null());
    CHECK(j["columns"]["dT_D"]["included"] == 1);
    CHECK(j["sequences_skipped"].size() == 6);
}

TEST_CASE("aggregation") {
    ComparisonReport a, b, skipped;
    a.method = b.method = skipped.method = "M";
    a.at(ReportColumn::BdrX) = {-10.0, 1};
    b.at(ReportColumn::BdrX) = {-20.0, 1};
    a.sequences_included = b.sequences_included = 1;
    skipped.skipped.push_back({"x", "BDR_X", "no quality overlap"});
    std::vector<ComparisonReport> all{a, b, skipped};
    auto agg = aggregate_report(all);
    CHECK(*agg.at(ReportColumn::BdrX).value == -15.0);
    CHECK(agg.at(ReportColumn::BdrX).included == 2);
    CHECK(agg.sequences_included == 2);
    REQUIRE(agg.skipped.size() == 1);
    CHECK(agg.skipped[0].reason == "no quality overlap");
    CHECK_FALSE(agg.at(ReportColumn::BdrP).value);

    std::vector<ComparisonReport> one{a};
    CHECK(*aggregate_report(one).at(ReportColumn::BdrX).value == -10.0);
    CHECK_THROWS_AS(aggregate_report(std::span<const ComparisonReport>{}), DataError);

    std::vector<ComparisonReport> rows{agg};
    auto table = format_table(rows);
    CHECK(table.find("BDR_X") != std::string::npos);
    CHECK(table.find("-15.00") != std::string::npos);
    CHECK(table.find("n/a") != std::string::npos);
}

TEST_CASE("histograms") {
    std::vector<double> v{1, 1, 3, 3};
    auto h = histogram_of(v, 2);
    CHECK(h.density == std::vector<double>{0.5, 0.5});
    CHECK(h.edges == std::vector<double>{1, 2, 3});

    std::vector<double> single{4.2};
    auto s = histogram_of(single, 10);
    CHECK(s.density == std::vector<double>{1.0});

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> xs(1 + rng() % 100);
        for (auto& x : xs) x = u(rng);
        auto hh = histogram_of(xs, 1 + static_cast<int>(rng() % 30));
        double sum = 0;
        for (double d : hh.density) sum += d;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(histogram_of(v, 0), UsageError);
    CHECK_THROWS_AS(histogram_of(std::span<const double>{}, 2), DataError);
    CHECK_THROWS_AS(histogram_of(v, 2, std::make_pair(2.0, 3.0)), UsageError);

    std::ostringstream os;
    write_histogram_csv(os, h);
    CHECK(os.str() == "bin_left,bin_right,density\n1,2,0.5\n2,3,0.5\n");
    CHECK(parse_ladder_field("decode_time") == LadderField::DecodeTime);
    CHECK_THROWS_AS(parse_ladder_field("ssim"), UsageError);
}

TEST_CASE("QT-PF decode-time mass lies left of DynRes") {
    // 2160p is better per bit but slow; 360p reaches higher quality only
    // beyond the top target, so it dominates every 2160p point in (time, quality).
    MeasurementSet set(SequenceId{"c", 2160, std::nullopt, std::nullopt});
    for (int q = 10; q <= 50; q += 2) {
        const double hi_mbps = 0.1 * std::pow(2.0, (50 - q) / 6.0);
        const double hi_v = 33.0 + (50 - q) * 0.275;
        set.add(EncodePoint{"c", 2160, q, hi_mbps * 1000.0, 3.0 + 0.01 * hi_mbps, hi_v, hi_v, hi_v * 2.0});
        const double lo_mbps = 0.15 * std::pow(2.0, (50 - q) / 4.0);
        const double lo_v = 30.0 + (50 - q) * 0.4;
        set.add(EncodePoint{"c", 360, q, lo_mbps * 1000.0, 0.5 + 0.01 * lo_mbps, lo_v, lo_v, lo_v * 2.0});
    }
    auto targets = TargetBitrateSet::defaults();
    std::vector<Ladder> qt{build_qt_pf_ladder(set, QualityMetric::Xpsnr, targets)};
    std::vector<Ladder> dyn{build_dynres_ladder(set, targets)};
    auto qt_times = pooled_values(qt, LadderField::DecodeTime);
    auto dyn_times = pooled_values(dyn, LadderField::DecodeTime);
    const double lo = std::min(*std::min_element(qt_times.begin(), qt_times.end()),
                               *std::min_element(dyn_times.begin(), dyn_times.end()));
    const double hi = std::max(*std::max_element(qt_times.begin(), qt_times.end()),
                               *std::max_element(dyn_times.begin(), dyn_times.end()));
    const int bins = 20;
    auto hq = distribution_summary(qt, LadderField::DecodeTime, bins, std::make_pair(lo, hi));
    auto hd = distribution_summary(dyn, LadderField::DecodeTime, bins, std::make_pair(lo, hi));
    int last_qt = -1, first_dyn = bins;
    for (int i = 0; i < bins; ++i) {
        if (hq.density[i] > 0) last_qt = i;
        if (hd.density[i] > 0 && first_dyn == bins) first_dyn = i;
    }
    CHECK(last_qt >= 0);
    CHECK(last_qt < first_dyn);
}
