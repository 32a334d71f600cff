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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rqt/measurements.hpp"

namespace rqt {

enum class DecodeTimeSource {
    Wall,  // minimum measured wall time over the repeats
    Tool,  // minimum of "decode_time_s=<x>" values printed by the decoder
};

// Command-template driven description of an encode/decode/metric toolchain.
//
// Templates are run through /bin/sh and may use these placeholders:
//   {input} {output}       stage input/output paths (see below)
//   {width} {height}       target resolution of the job
//   {qp} {threads} {fps}   encode settings
//   {frames} {sequence}    sequence frame count and name
//   {native_width} {native_height}  source resolution
//   {source}               source video path (same as {input} when encoding)
// Stage paths: encode reads the source and writes the bitstream; decode
// reads the bitstream and writes the reconstruction; metric reads the source
// ({input}) and the reconstruction ({output}) and must print lines such as
// "xpsnr=41.2" for each metric it computes (psnr, xpsnr, vmaf).
struct HarnessConfig {
    std::vector<int> resolutions;
    std::vector<int> qps;
    int aspect_width = 16;
    int aspect_height = 9;
    std::string input_template = "{sequence}.yuv";
    std::string encode_template;
    std::string decode_template;
    std::string metric_template;
    int threads_per_job = 4;
    int parallel_jobs = 1;
    int repeats = 1;
    std::filesystem::path workdir = "work";
    DecodeTimeSource decode_time_source = DecodeTimeSource::Wall;
    bool keep_intermediate = false;
    // Optional tool name -> command whose first output line is recorded.
    std::map<std::string, std::string> version_commands;

    // Grid and thread count of the reference VVenC/VVdeC setup.
    static HarnessConfig defaults();

    // Throws UsageError describing the first violated invariant.
    void validate() const;

    Grid grid() const;
    int width_for(int height) const;
};

HarnessConfig harness_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HarnessConfig& config);
HarnessConfig load_harness_config(const std::filesystem::path& path);

struct Job {
    SequenceId sequence;
    int resolution = 0;
    int qp = 0;
    bool skippable = false;
};

struct JobResult {
    std::string sequence;
    int resolution = 0;
    int qp = 0;
    bool success = false;
    std::uintmax_t bitstream_bytes = 0;
    double bitrate_kbps = 0.0;
    double decode_time_s = 0.0;
    std::optional<double> psnr_db;
    std::optional<double> xpsnr_db;
    std::optional<double> vmaf;
    // Set on failure: encode, decode or metric.
    std::string failed_stage;
    int exit_status = 0;
    std::string log;

    EncodePoint to_point() const;
};

nlohmann::json to_json(const JobResult& result);
JobResult job_result_from_json(const nlohmann::json& j);

// Append-only line-delimited JSON record of finished jobs.
class ResumeManifest {
public:
    // Missing file yields an empty manifest. A torn final line (crash during
    // a write) is ignored; corruption elsewhere throws DataError.
    static ResumeManifest load(const std::filesystem::path& path);

    // Latest recorded result per (sequence, resolution, qp).
    const std::vector<JobResult>& results() const { return results_; }
    const JobResult* find(const std::string& sequence, int resolution, int qp) const;
    bool completed(const std::string& sequence, int resolution, int qp) const;

private:
    std::vector<JobResult> results_;
};

class ManifestWriter {
public:
    // Opens for appending, discarding a torn final record; `truncate` starts
    // a fresh manifest.
    ManifestWriter(const std::filesystem::path& path, bool truncate);

    void append(const JobResult& result);

private:
    std::mutex mutex_;
    std::ofstream out_;
};

// |sequences| x |R| x |Q| jobs ordered by sequence, then resolution, then QP
// (both ascending). Jobs with a successful manifest entry are skippable.
std::vector<Job> plan_jobs(std::span<const SequenceId> sequences, const HarnessConfig& config,
                           const ResumeManifest* resume = nullptr);

struct RunOptions {
    // Stop starting new jobs after this many; simulates an interrupted run.
    std::optional<std::size_t> max_jobs;
    // When set, no further jobs start; jobs that fail after it is raised are
    // dropped so a resumed run retries them.
    const std::atomic<bool>* stop = nullptr;
};

struct CommandOutput {
    int exit_status = 0;
    std::string output;
};

// Runs `command` through /bin/sh, capturing stdout and stderr together.
CommandOutput run_command(const std::string& command);

// Bitrate of a bitstream in kbps.
double bitrate_kbps(std::uintmax_t bytes, double duration_s);

// Extracts psnr/xpsnr/vmaf values from "name=value" or "name: value" tokens.
struct MetricValues {
    std::optional<double> psnr_db;
    std::optional<double> xpsnr_db;
    std::optional<double> vmaf;
};
MetricValues parse_metric_output(const std::string& text);
std::optional<double> parse_reported_decode_time(const std::string& text);

// Executes the non-skippable jobs of `plan` with at most parallel_jobs in
// flight. Each finished job is appended to `manifest` (if given) before the
// next one is picked up. Returns the executed jobs' results in plan order.
std::vector<JobResult> run_jobs(std::span<const Job> plan, const HarnessConfig& config,
                                ManifestWriter* manifest = nullptr, const RunOptions& options = {});

inline constexpr std::string_view kFailureHeader = "sequence,resolution,qp,stage,exit_status";

// Writes successful results as measurement CSV and failures as the sidecar
// CSV. Throws DataError when there is no success.
void export_measurements(std::span<const JobResult> results, std::ostream& csv, std::ostream& failures);

} // namespace rqt
