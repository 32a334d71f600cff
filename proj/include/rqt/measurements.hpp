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
#include <string_view>
#include <vector>

namespace rqt {

enum class QualityMetric { Psnr, Xpsnr, Vmaf };

inline constexpr QualityMetric kAllQualityMetrics[] = {
    QualityMetric::Psnr, QualityMetric::Xpsnr, QualityMetric::Vmaf};

std::string_view to_string(QualityMetric metric);

// Accepts "psnr", "xpsnr", "vmaf" (case-insensitive). Throws UsageError.
QualityMetric parse_quality_metric(std::string_view name);

// Configured encode grid: the resolution set R (vertical pixels) and QP set Q.
struct Grid {
    std::vector<int> resolutions;
    std::vector<int> qps;

    // R = {360, 540, 720, 1080, 1440, 2160}, Q = {10, 12, ..., 50}.
    static Grid defaults();

    bool has_resolution(int r) const;
    bool has_qp(int q) const;
    int max_resolution() const;
};

// A test sequence. Frame rate and count are only known when a metadata file
// was supplied; when present they are positive.
struct SequenceId {
    std::string name;
    int native_resolution = 2160;
    std::optional<double> frame_rate;
    std::optional<long long> frame_count;

    std::optional<double> duration_s() const;

    // Throws DataError when an invariant does not hold.
    void validate(const Grid& grid) const;

    bool operator==(const SequenceId&) const = default;
};

// One measured encode at (resolution, qp).
struct EncodePoint {
    std::string sequence;
    int resolution = 0;
    int qp = 0;
    double bitrate_kbps = 0.0;
    double decode_time_s = 0.0;
    std::optional<double> psnr_db;
    std::optional<double> xpsnr_db;
    std::optional<double> vmaf;

    std::optional<double> quality(QualityMetric metric) const;

    // Throws DataError naming the point when the metric is absent.
    double require_quality(QualityMetric metric) const;

    double bitrate_mbps() const { return bitrate_kbps / 1000.0; }

    // Throws DataError describing the first violated invariant.
    void validate(const Grid& grid) const;

    bool operator==(const EncodePoint&) const = default;
};

std::string describe(const EncodePoint& point);

// All encodes of one sequence, unique on (resolution, qp).
class MeasurementSet {
public:
    MeasurementSet() = default;
    explicit MeasurementSet(SequenceId sequence);

    const SequenceId& sequence() const { return sequence_; }
    std::span<const EncodePoint> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    // Throws DataError on sequence mismatch or duplicate (resolution, qp).
    void add(EncodePoint point);

    bool contains(int resolution, int qp) const;

    bool operator==(const MeasurementSet&) const = default;

private:
    SequenceId sequence_;
    std::vector<EncodePoint> points_;
};

MeasurementSet merge_sets(const MeasurementSet& a, const MeasurementSet& b);

inline constexpr std::string_view kMeasurementHeader =
    "sequence,resolution,qp,bitrate_kbps,decode_time_s,psnr_db,xpsnr_db,vmaf";
inline constexpr std::string_view kSequenceHeader =
    "sequence,native_resolution,fps,frame_count";

// Parses the measurement CSV. Sets are returned ordered by sequence name with
// points in file order. When `metadata` is given, every sequence must appear
// in it; otherwise the native resolution defaults to the grid maximum.
// Errors carry the 1-based line number of the offending row.
std::vector<MeasurementSet> parse_measurements(
    std::istream& in, const Grid& grid = Grid::defaults(),
    std::span<const SequenceId> metadata = {});

void write_measurements(std::ostream& out, std::span<const MeasurementSet> sets);
void write_measurement_row(std::ostream& out, const EncodePoint& point);

std::vector<SequenceId> parse_sequence_metadata(std::istream& in, const Grid& grid = Grid::defaults());
void write_sequence_metadata(std::ostream& out, std::span<const SequenceId> sequences);

} // namespace rqt
