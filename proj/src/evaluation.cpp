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

#include "rqt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "rqt/text.hpp"

namespace rqt {

RateQualityCurve RateQualityCurve::from_ladder(const Ladder& ladder, QualityMetric metric) {
    RateQualityCurve curve;
    for (const auto& rung : ladder.rungs) {
        if (!rung.selected) continue;
        std::pair<double, double> sample{std::log10(rung.selected->bitrate_kbps),
                                         rung.selected->require_quality(metric)};
        if (std::find(curve.samples.begin(), curve.samples.end(), sample) == curve.samples.end()) {
            curve.samples.push_back(sample);
        }
    }
    return curve;
}

namespace {

// Sorts (x, y) by x and keeps one y per distinct x, chosen by `better`.
template <typename Better>
MonotoneCubic interpolant(std::vector<std::pair<double, double>> xy, Better better) {
    std::sort(xy.begin(), xy.end());
    std::vector<double> xs, ys;
    for (const auto& [x, y] : xy) {
        if (!xs.empty() && xs.back() == x) {
            if (better(y, ys.back())) ys.back() = y;
            continue;
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.size() < 2) {
        throw BdError(BdError::Reason::InsufficientSamples, "curve has fewer than two distinct samples");
    }
    return MonotoneCubic(std::move(xs), std::move(ys));
}

double mean_difference(const MonotoneCubic& method, const MonotoneCubic& reference) {
    auto [lo, hi] = overlap(method, reference);
    return (method.integrate(lo, hi) - reference.integrate(lo, hi)) / (hi - lo);
}

} // namespace

MonotoneCubic rate_interpolant(const RateQualityCurve& curve) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& [rate, quality] : curve.samples) xy.emplace_back(quality, rate);
    return interpolant(std::move(xy), [](double a, double b) { return a < b; });
}

MonotoneCubic quality_interpolant(const RateQualityCurve& curve) {
    return interpolant(curve.samples, [](double a, double b) { return a > b; });
}

std::pair<double, double> overlap(const MonotoneCubic& a, const MonotoneCubic& b) {
    const double lo = std::max(a.front(), b.front());
    const double hi = std::min(a.back(), b.back());
    if (!(hi > lo)) {
        throw BdError(BdError::Reason::NoOverlap, "curves do not overlap");
    }
    return {lo, hi};
}

double bd_rate(const RateQualityCurve& method, const RateQualityCurve& reference) {
    const double d = mean_difference(rate_interpolant(method), rate_interpolant(reference));
    return (std::pow(10.0, d) - 1.0) * 100.0;
}

double bd_quality(const RateQualityCurve& method, const RateQualityCurve& reference) {
    return mean_difference(quality_interpolant(method), quality_interpolant(reference));
}

double delta_decode_time(const Ladder& method, const Ladder& reference) {
    if (method.sequence != reference.sequence) {
        throw DataError("cannot compare ladders of sequences '" + method.sequence + "' and '" +
                        reference.sequence + "'");
    }
    auto total = [](const Ladder& ladder) {
        double sum = 0.0;
        for (const auto& rung : ladder.rungs) {
            if (rung.selected) sum += rung.selected->decode_time_s;
        }
        return sum;
    };
    if (method.present_count() == 0 || reference.present_count() == 0) {
        throw DataError("ladder without present rungs for sequence '" + method.sequence + "'");
    }
    const double ref = total(reference);
    return (total(method) - ref) / ref * 100.0;
}

std::string_view column_name(ReportColumn column) {
    switch (column) {
    case ReportColumn::BdrP:
        return "BDR_P";
    case ReportColumn::BdrX:
        return "BDR_X";
    case ReportColumn::BdrV:
        return "BDR_V";
    case ReportColumn::BdPsnr:
        return "BD-PSNR";
    case ReportColumn::BdXpsnr:
        return "BD-XPSNR";
    case ReportColumn::BdVmaf:
        return "BD-VMAF";
    case ReportColumn::DeltaTd:
        return "dT_D";
    }
    return "unknown";
}

namespace {

struct MetricColumns {
    QualityMetric metric;
    ReportColumn rate;
    ReportColumn quality;
};

constexpr MetricColumns kMetricColumns[] = {
    {QualityMetric::Psnr, ReportColumn::BdrP, ReportColumn::BdPsnr},
    {QualityMetric::Xpsnr, ReportColumn::BdrX, ReportColumn::BdXpsnr},
    {QualityMetric::Vmaf, ReportColumn::BdrV, ReportColumn::BdVmaf},
};

std::string reason_text(const BdError& e, bool rate_domain) {
    if (e.reason() == BdError::Reason::InsufficientSamples) return "fewer than two distinct samples";
    return rate_domain ? "no quality overlap" : "no bitrate overlap";
}

} // namespace

ComparisonReport compare_ladders(const Ladder& method, const Ladder& reference) {
    if (method.sequence != reference.sequence) {
        throw DataError("cannot compare ladders of sequences '" + method.sequence + "' and '" +
                        reference.sequence + "'");
    }
    ComparisonReport report;
    report.method = method.method.label();
    report.reference = reference.method.label();
    report.sequence = method.sequence;
    auto skip = [&](ReportColumn column, std::string reason) {
        report.skipped.push_back({method.sequence, std::string(column_name(column)), std::move(reason)});
    };
    auto set = [&](ReportColumn column, double value) {
        report.at(column).value = value;
        report.at(column).included = 1;
    };

    for (const auto& mc : kMetricColumns) {
        std::optional<RateQualityCurve> m, r;
        try {
            m = RateQualityCurve::from_ladder(method, mc.metric);
            r = RateQualityCurve::from_ladder(reference, mc.metric);
        } catch (const DataError&) {
            skip(mc.rate, "metric missing");
            skip(mc.quality, "metric missing");
            continue;
        }
        try {
            set(mc.rate, bd_rate(*m, *r));
        } catch (const BdError& e) {
            skip(mc.rate, reason_text(e, true));
        }
        try {
            set(mc.quality, bd_quality(*m, *r));
        } catch (const BdError& e) {
            skip(mc.quality, reason_text(e, false));
        }
    }
    try {
        set(ReportColumn::DeltaTd, delta_decode_time(method, reference));
    } catch (const DataError&) {
        skip(ReportColumn::DeltaTd, "no present rungs");
    }
    report.sequences_included = report.skipped.empty() ? 1 : 0;
    return report;
}

ComparisonReport aggregate_report(std::span<const ComparisonReport> per_sequence) {
    if (per_sequence.empty()) {
        throw DataError("cannot aggregate an empty set of comparison reports");
    }
    ComparisonReport out;
    out.method = per_sequence.front().method;
    out.reference = per_sequence.front().reference;
    for (ReportColumn column : kReportColumns) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : per_sequence) {
            if (r.at(column).value) {
                sum += *r.at(column).value * static_cast<double>(r.at(column).included);
                n += r.at(column).included;
            }
        }
        if (n > 0) {
            out.at(column).value = sum / static_cast<double>(n);
            out.at(column).included = n;
        }
    }
    for (const auto& r : per_sequence) {
        out.sequences_included += r.sequences_included;
        out.skipped.insert(out.skipped.end(), r.skipped.begin(), r.skipped.end());
    }
    return out;
}

nlohmann::json to_json(const ComparisonReport& report) {
    nlohmann::json j;
    j["method"] = report.method;
    j["reference"] = report.reference;
    if (!report.sequence.empty()) {
        j["sequence"] = report.sequence;
    }
    nlohmann::json columns = nlohmann::json::object();
    for (ReportColumn column : kReportColumns) {
        const auto& stat = report.at(column);
        columns[std::string(column_name(column))] = {
            {"value", stat.value ? nlohmann::json(*stat.value) : nlohmann::json(nullptr)},
            {"included", stat.included}};
    }
    j["columns"] = std::move(columns);
    j["sequences_included"] = report.sequences_included;
    auto skipped = nlohmann::json::array();
    for (const auto& s : report.skipped) {
        skipped.push_back({{"sequence", s.sequence}, {"column", s.column}, {"reason", s.reason}});
    }
    j["sequences_skipped"] = std::move(skipped);
    return j;
}

std::string format_table(std::span<const ComparisonReport> rows) {
    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.method.size());

    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width)) << "Method";
    for (ReportColumn column : kReportColumns) {
        os << " | " << std::right << std::setw(9) << column_name(column);
    }
    os << '\n' << std::string(width + kReportColumns.size() * 12, '-') << '\n';
    os << std::fixed << std::setprecision(2);
    for (const auto& r : rows) {
        os << std::left << std::setw(static_cast<int>(width)) << r.method;
        for (ReportColumn column : kReportColumns) {
            os << " | " << std::right << std::setw(9);
            if (r.at(column).value) {
                os << *r.at(column).value;
            } else {
                os << "n/a";
            }
        }
        os << '\n';
    }
    return os.str();
}

std::string_view to_string(LadderField field) {
    switch (field) {
    case LadderField::DecodeTime:
        return "decode_time";
    case LadderField::Bitrate:
        return "bitrate";
    case LadderField::Psnr:
        return "psnr";
    case LadderField::Xpsnr:
        return "xpsnr";
    case LadderField::Vmaf:
        return "vmaf";
    }
    return "unknown";
}

LadderField parse_ladder_field(std::string_view name) {
    for (LadderField f : {LadderField::DecodeTime, LadderField::Bitrate, LadderField::Psnr, LadderField::Xpsnr,
                          LadderField::Vmaf}) {
        if (name == to_string(f)) return f;
    }
    throw UsageError("unknown field '" + std::string(name) + "' (expected decode_time, bitrate, psnr, xpsnr or vmaf)");
}

std::vector<double> pooled_values(std::span<const Ladder> ladders, LadderField field) {
    std::vector<double> values;
    for (const auto& ladder : ladders) {
        for (const auto& rung : ladder.rungs) {
            if (!rung.selected) continue;
            const auto& p = *rung.selected;
            std::optional<double> v;
            switch (field) {
            case LadderField::DecodeTime:
                v = p.decode_time_s;
                break;
            case LadderField::Bitrate:
                v = p.bitrate_kbps;
                break;
            case LadderField::Psnr:
                v = p.psnr_db;
                break;
            case LadderField::Xpsnr:
                v = p.xpsnr_db;
                break;
            case LadderField::Vmaf:
                v = p.vmaf;
                break;
            }
            if (!v) {
                throw DataError("field '" + std::string(to_string(field)) + "' is absent from a rung of sequence '" +
                                ladder.sequence + "'");
            }
            values.push_back(*v);
        }
    }
    if (values.empty()) {
        throw DataError("no present rungs to summarise for field '" + std::string(to_string(field)) + "'");
    }
    return values;
}

Histogram histogram_of(std::span<const double> values, int bins, std::optional<std::pair<double, double>> range) {
    if (bins < 1) {
        throw UsageError("bin count must be positive");
    }
    if (values.empty()) {
        throw DataError("cannot build a histogram of no values");
    }
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = range ? range->first : *mn;
    double hi = range ? range->second : *mx;
    if (*mn < lo || *mx > hi) {
        throw UsageError("histogram range does not cover the values");
    }

    Histogram h;
    if (!(hi > lo)) {
        h.edges = {lo, hi};
        h.density = {1.0};
        return h;
    }
    const auto n = static_cast<std::size_t>(bins);
    h.edges.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    }
    h.edges[n] = hi;
    std::vector<std::size_t> counts(n, 0);
    for (double v : values) {
        auto k = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(n)));
        counts[std::min(k, n - 1)]++;
    }
    h.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        h.density[i] = static_cast<double>(counts[i]) / static_cast<double>(values.size());
    }
    return h;
}

Histogram distribution_summary(std::span<const Ladder> ladders, LadderField field, int bins,
                               std::optional<std::pair<double, double>> range) {
    const auto values = pooled_values(ladders, field);
    return histogram_of(values, bins, range);
}

void write_histogram_csv(std::ostream& out, const Histogram& histogram) {
    out << "bin_left,bin_right,density\n";
    for (std::size_t i = 0; i < histogram.density.size(); ++i) {
        out << format_double(histogram.edges[i]) << ',' << format_double(histogram.edges[i + 1]) << ','
            << format_double(histogram.density[i]) << '\n';
    }
}

} // namespace rqt
