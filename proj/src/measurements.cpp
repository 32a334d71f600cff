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

#include "rqt/measurements.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rqt/errors.hpp"
#include "rqt/text.hpp"

namespace rqt {

std::string_view to_string(QualityMetric metric) {
    switch (metric) {
    case QualityMetric::Psnr:
        return "psnr";
    case QualityMetric::Xpsnr:
        return "xpsnr";
    case QualityMetric::Vmaf:
        return "vmaf";
    }
    return "unknown";
}

QualityMetric parse_quality_metric(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "psnr") return QualityMetric::Psnr;
    if (lower == "xpsnr") return QualityMetric::Xpsnr;
    if (lower == "vmaf") return QualityMetric::Vmaf;
    throw UsageError("unknown quality metric '" + std::string(name) + "' (expected psnr, xpsnr or vmaf)");
}

Grid Grid::defaults() {
    Grid grid;
    grid.resolutions = {360, 540, 720, 1080, 1440, 2160};
    for (int q = 10; q <= 50; q += 2) {
        grid.qps.push_back(q);
    }
    return grid;
}

bool Grid::has_resolution(int r) const {
    return std::find(resolutions.begin(), resolutions.end(), r) != resolutions.end();
}

bool Grid::has_qp(int q) const {
    return std::find(qps.begin(), qps.end(), q) != qps.end();
}

int Grid::max_resolution() const {
    if (resolutions.empty()) {
        throw UsageError("resolution set is empty");
    }
    return *std::max_element(resolutions.begin(), resolutions.end());
}

std::optional<double> SequenceId::duration_s() const {
    if (!frame_rate || !frame_count) {
        return std::nullopt;
    }
    return static_cast<double>(*frame_count) / *frame_rate;
}

void SequenceId::validate(const Grid& grid) const {
    if (name.empty()) {
        throw DataError("sequence name is empty");
    }
    if (name.find(',') != std::string::npos) {
        throw DataError("sequence name '" + name + "' contains a comma");
    }
    if (!grid.has_resolution(native_resolution)) {
        throw DataError("sequence '" + name + "': native resolution " + std::to_string(native_resolution) +
                        " is not in the configured resolution set");
    }
    if (frame_rate && !(*frame_rate > 0.0)) {
        throw DataError("sequence '" + name + "': frame rate must be positive");
    }
    if (frame_count && *frame_count <= 0) {
        throw DataError("sequence '" + name + "': frame count must be positive");
    }
}

std::optional<double> EncodePoint::quality(QualityMetric metric) const {
    switch (metric) {
    case QualityMetric::Psnr:
        return psnr_db;
    case QualityMetric::Xpsnr:
        return xpsnr_db;
    case QualityMetric::Vmaf:
        return vmaf;
    }
    return std::nullopt;
}

double EncodePoint::require_quality(QualityMetric metric) const {
    auto v = quality(metric);
    if (!v) {
        throw DataError(describe(*this) + " has no " + std::string(to_string(metric)) + " value");
    }
    return *v;
}

void EncodePoint::validate(const Grid& grid) const {
    if (sequence.empty()) {
        throw DataError("empty sequence name");
    }
    if (!(bitrate_kbps > 0.0)) {
        throw DataError("bitrate must be positive, got " + format_double(bitrate_kbps));
    }
    if (!(decode_time_s > 0.0)) {
        throw DataError("decode time must be positive, got " + format_double(decode_time_s));
    }
    if (!grid.has_resolution(resolution)) {
        throw DataError("resolution " + std::to_string(resolution) + " is not in the configured resolution set");
    }
    if (!grid.has_qp(qp)) {
        throw DataError("qp " + std::to_string(qp) + " is not in the configured QP set");
    }
    if (!psnr_db && !xpsnr_db && !vmaf) {
        throw DataError("no quality value present");
    }
    if (vmaf && (*vmaf < 0.0 || *vmaf > 100.0)) {
        throw DataError("vmaf " + format_double(*vmaf) + " outside [0, 100]");
    }
}

std::string describe(const EncodePoint& point) {
    std::ostringstream os;
    os << "point (" << point.sequence << ", " << point.resolution << "p, qp " << point.qp << ")";
    return os.str();
}

MeasurementSet::MeasurementSet(SequenceId sequence) : sequence_(std::move(sequence)) {}

bool MeasurementSet::contains(int resolution, int qp) const {
    return std::any_of(points_.begin(), points_.end(),
                       [&](const EncodePoint& p) { return p.resolution == resolution && p.qp == qp; });
}

void MeasurementSet::add(EncodePoint point) {
    if (point.sequence != sequence_.name) {
        throw DataError("point for sequence '" + point.sequence + "' added to set of sequence '" +
                        sequence_.name + "'");
    }
    if (contains(point.resolution, point.qp)) {
        throw DataError("duplicate " + describe(point));
    }
    points_.push_back(std::move(point));
}

MeasurementSet merge_sets(const MeasurementSet& a, const MeasurementSet& b) {
    if (a.sequence().name != b.sequence().name) {
        throw DataError("cannot merge sets of different sequences '" + a.sequence().name + "' and '" +
                        b.sequence().name + "'");
    }
    MeasurementSet merged = a;
    for (const auto& p : b.points()) {
        merged.add(p);
    }
    return merged;
}

namespace {

std::string line_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

std::optional<double> optional_column(std::string_view field, std::size_t line, std::string_view column) {
    if (trim(field).empty()) {
        return std::nullopt;
    }
    auto v = parse_double(field);
    if (!v) {
        throw DataError(line_error(line, "malformed " + std::string(column) + " '" + std::string(field) + "'"));
    }
    return v;
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
    if (v) {
        out << format_double(*v);
    }
}

template <typename Fn>
void for_each_line(std::istream& in, std::string_view header, Fn&& fn) {
    std::string line;
    std::size_t number = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++number;
        auto view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (!seen_header) {
            if (view != header) {
                throw DataError(line_error(number, "expected header '" + std::string(header) + "'"));
            }
            seen_header = true;
            continue;
        }
        fn(view, number);
    }
    if (!seen_header) {
        throw DataError("missing header row '" + std::string(header) + "'");
    }
}

} // namespace

std::vector<MeasurementSet> parse_measurements(std::istream& in, const Grid& grid,
                                               std::span<const SequenceId> metadata) {
    std::map<std::string, MeasurementSet> sets;
    for_each_line(in, kMeasurementHeader, [&](std::string_view row, std::size_t number) {
        auto fields = split(row, ',');
        if (fields.size() != 8) {
            throw DataError(line_error(number, "expected 8 fields, found " + std::to_string(fields.size())));
        }
        EncodePoint p;
        p.sequence = std::string(trim(fields[0]));
        auto r = parse_int(fields[1]);
        auto q = parse_int(fields[2]);
        auto b = parse_double(fields[3]);
        auto t = parse_double(fields[4]);
        if (!r) throw DataError(line_error(number, "malformed resolution '" + std::string(fields[1]) + "'"));
        if (!q) throw DataError(line_error(number, "malformed qp '" + std::string(fields[2]) + "'"));
        if (!b) throw DataError(line_error(number, "malformed bitrate_kbps '" + std::string(fields[3]) + "'"));
        if (!t) throw DataError(line_error(number, "malformed decode_time_s '" + std::string(fields[4]) + "'"));
        p.resolution = static_cast<int>(*r);
        p.qp = static_cast<int>(*q);
        p.bitrate_kbps = *b;
        p.decode_time_s = *t;
        p.psnr_db = optional_column(fields[5], number, "psnr_db");
        p.xpsnr_db = optional_column(fields[6], number, "xpsnr_db");
        p.vmaf = optional_column(fields[7], number, "vmaf");
        try {
            p.validate(grid);
        } catch (const DataError& e) {
            throw DataError(line_error(number, e.what()));
        }

        auto it = sets.find(p.sequence);
        if (it == sets.end()) {
            SequenceId id{p.sequence, grid.max_resolution(), std::nullopt, std::nullopt};
            if (!metadata.empty()) {
                auto meta = std::find_if(metadata.begin(), metadata.end(),
                                         [&](const SequenceId& s) { return s.name == p.sequence; });
                if (meta == metadata.end()) {
                    throw DataError(line_error(number, "sequence '" + p.sequence + "' missing from metadata"));
                }
                id = *meta;
            }
            it = sets.emplace(p.sequence, MeasurementSet(std::move(id))).first;
        }
        try {
            it->second.add(std::move(p));
        } catch (const DataError& e) {
            throw DataError(line_error(number, e.what()));
        }
    });

    std::vector<MeasurementSet> out;
    out.reserve(sets.size());
    for (auto& [name, set] : sets) {
        out.push_back(std::move(set));
    }
    return out;
}

void write_measurement_row(std::ostream& out, const EncodePoint& p) {
    out << p.sequence << ',' << p.resolution << ',' << p.qp << ',' << format_double(p.bitrate_kbps) << ','
        << format_double(p.decode_time_s) << ',';
    write_optional(out, p.psnr_db);
    out << ',';
    write_optional(out, p.xpsnr_db);
    out << ',';
    write_optional(out, p.vmaf);
    out << '\n';
}

void write_measurements(std::ostream& out, std::span<const MeasurementSet> sets) {
    out << kMeasurementHeader << '\n';
    for (const auto& set : sets) {
        for (const auto& p : set.points()) {
            write_measurement_row(out, p);
        }
    }
}

std::vector<SequenceId> parse_sequence_metadata(std::istream& in, const Grid& grid) {
    std::vector<SequenceId> out;
    for_each_line(in, kSequenceHeader, [&](std::string_view row, std::size_t number) {
        auto fields = split(row, ',');
        if (fields.size() != 4) {
            throw DataError(line_error(number, "expected 4 fields, found " + std::to_string(fields.size())));
        }
        SequenceId id;
        id.name = std::string(trim(fields[0]));
        auto native = parse_int(fields[1]);
        auto fps = parse_double(fields[2]);
        auto frames = parse_int(fields[3]);
        if (!native || !fps || !frames) {
            throw DataError(line_error(number, "malformed sequence metadata row"));
        }
        id.native_resolution = static_cast<int>(*native);
        id.frame_rate = *fps;
        id.frame_count = *frames;
        try {
            id.validate(grid);
        } catch (const DataError& e) {
            throw DataError(line_error(number, e.what()));
        }
        if (std::any_of(out.begin(), out.end(), [&](const SequenceId& s) { return s.name == id.name; })) {
            throw DataError(line_error(number, "duplicate sequence '" + id.name + "'"));
        }
        out.push_back(std::move(id));
    });
    return out;
}

void write_sequence_metadata(std::ostream& out, std::span<const SequenceId> sequences) {
    out << kSequenceHeader << '\n';
    for (const auto& s : sequences) {
        out << s.name << ',' << s.native_resolution << ',' << (s.frame_rate ? format_double(*s.frame_rate) : "")
            << ',' << (s.frame_count ? std::to_string(*s.frame_count) : "") << '\n';
    }
}

} // namespace rqt
