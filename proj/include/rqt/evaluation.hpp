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

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rqt/errors.hpp"
#include "rqt/ladder.hpp"
#include "rqt/pchip.hpp"

namespace rqt {

// (log10 bitrate_kbps, quality) samples of a ladder's present rungs.
struct RateQualityCurve {
    std::vector<std::pair<double, double>> samples;

    // Drops absent rungs and repeated (shared-point) samples. Throws
    // DataError when a present rung lacks `metric`.
    static RateQualityCurve from_ladder(const Ladder& ladder, QualityMetric metric);
};

class BdError : public DataError {
public:
    enum class Reason { InsufficientSamples, NoOverlap };

    BdError(Reason reason, const std::string& what) : DataError(what), reason_(reason) {}

    Reason reason() const { return reason_; }

private:
    Reason reason_;
};

// log10 rate as a function of quality. Samples are sorted by quality; equal
// qualities keep the lowest rate. Throws BdError with fewer than two
// distinct qualities.
MonotoneCubic rate_interpolant(const RateQualityCurve& curve);

// Quality as a function of log10 rate; equal rates keep the highest quality.
MonotoneCubic quality_interpolant(const RateQualityCurve& curve);

// Common domain of two interpolants; BdError(NoOverlap) if empty or a point.
std::pair<double, double> overlap(const MonotoneCubic& a, const MonotoneCubic& b);

// Average bitrate difference of `method` over `reference` at equal quality, in percent.
double bd_rate(const RateQualityCurve& method, const RateQualityCurve& reference);

// Average quality difference at equal bitrate, in the metric's units.
double bd_quality(const RateQualityCurve& method, const RateQualityCurve& reference);

// Percent change of summed decode times over present rungs. Throws DataError
// when either ladder has no present rung or the sequences differ.
double delta_decode_time(const Ladder& method, const Ladder& reference);

enum class ReportColumn { BdrP, BdrX, BdrV, BdPsnr, BdXpsnr, BdVmaf, DeltaTd };

inline constexpr std::array<ReportColumn, 7> kReportColumns = {
    ReportColumn::BdrP,   ReportColumn::BdrX,    ReportColumn::BdrV,   ReportColumn::BdPsnr,
    ReportColumn::BdXpsnr, ReportColumn::BdVmaf, ReportColumn::DeltaTd};

std::string_view column_name(ReportColumn column);

struct ColumnStat {
    std::optional<double> value;
    std::size_t included = 0;
};

struct SkipRecord {
    std::string sequence;
    std::string column;
    std::string reason;
};

struct ComparisonReport {
    std::string method;
    std::string reference;
    // Empty for aggregated reports.
    std::string sequence;
    std::array<ColumnStat, kReportColumns.size()> columns{};
    // Sequences for which every column was computable.
    std::size_t sequences_included = 0;
    std::vector<SkipRecord> skipped;

    const ColumnStat& at(ReportColumn column) const { return columns[static_cast<std::size_t>(column)]; }
    ColumnStat& at(ReportColumn column) { return columns[static_cast<std::size_t>(column)]; }
};

// Per-sequence comparison. Columns that cannot be computed are recorded as
// skipped rather than thrown.
ComparisonReport compare_ladders(const Ladder& method, const Ladder& reference);

// Column-wise mean over the reports where the column was computed.
ComparisonReport aggregate_report(std::span<const ComparisonReport> per_sequence);

nlohmann::json to_json(const ComparisonReport& report);

// Rows are methods; columns as in kReportColumns.
std::string format_table(std::span<const ComparisonReport> rows);

enum class LadderField { DecodeTime, Bitrate, Psnr, Xpsnr, Vmaf };

std::string_view to_string(LadderField field);
LadderField parse_ladder_field(std::string_view name);

struct Histogram {
    std::vector<double> edges;    // bins + 1 edges
    std::vector<double> density;  // per-bin share of the pooled values, sums to 1
};

// Pooled values of `field` over the present rungs of all ladders. Bitrate is
// in kbps and decode time in seconds. Throws DataError if a rung lacks the
// field or nothing is pooled.
std::vector<double> pooled_values(std::span<const Ladder> ladders, LadderField field);

// Equal-width histogram over `range` (default: [min, max] of the values).
// When the range is degenerate a single bin of density 1 is returned.
Histogram distribution_summary(std::span<const Ladder> ladders, LadderField field, int bins,
                               std::optional<std::pair<double, double>> range = std::nullopt);

Histogram histogram_of(std::span<const double> values, int bins,
                       std::optional<std::pair<double, double>> range = std::nullopt);

void write_histogram_csv(std::ostream& out, const Histogram& histogram);

} // namespace rqt
