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

#include "rqt/harness.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <iterator>
#include <limits>
#include <ostream>
#include <regex>
#include <thread>

#include "rqt/errors.hpp"
#include "rqt/text.hpp"

namespace rqt {

namespace fs = std::filesystem;

HarnessConfig HarnessConfig::defaults() {
    HarnessConfig c;
    c.resolutions = Grid::defaults().resolutions;
    c.qps = Grid::defaults().qps;
    c.input_template = "{sequence}.yuv";
    // Preset, intra period and threads mirror the reference encoder setup;
    // downscaling is part of the toolchain, not the harness.
    c.encode_template =
        "ffmpeg -loglevel error -f rawvideo -pix_fmt yuv420p10le -s {native_width}x{native_height} -r {fps} "
        "-i {input} -vf scale={width}:{height}:flags=lanczos -f rawvideo - | "
        "vvencapp -i - -s {width}x{height} -c yuv420_10 -r {fps} --preset faster --qp {qp} "
        "--refreshsec 1 --threads {threads} -o {output}";
    c.decode_template = "vvdecapp -b {input} -o {output} -t {threads}";
    c.metric_template = "rqt-metrics {input} {output} {width} {height} {native_width} {native_height}";
    c.threads_per_job = 4;
    c.parallel_jobs = 1;
    c.repeats = 1;
    return c;
}

namespace {

void require_placeholders(const std::string& name, const std::string& tmpl,
                          std::initializer_list<std::string_view> keys) {
    if (tmpl.empty()) {
        throw UsageError(name + " is empty");
    }
    for (auto key : keys) {
        if (tmpl.find("{" + std::string(key) + "}") == std::string::npos) {
            throw UsageError(name + " lacks the {" + std::string(key) + "} placeholder");
        }
    }
}

} // namespace

void HarnessConfig::validate() const {
    if (resolutions.empty()) throw UsageError("config: resolutions must not be empty");
    if (qps.empty()) throw UsageError("config: qps must not be empty");
    for (int r : resolutions) {
        if (r <= 0) throw UsageError("config: resolutions must be positive");
    }
    if (aspect_width <= 0 || aspect_height <= 0) throw UsageError("config: aspect ratio must be positive");
    if (threads_per_job < 1) throw UsageError("config: threads_per_job must be >= 1");
    if (parallel_jobs < 1) throw UsageError("config: parallel_jobs must be >= 1");
    if (repeats < 1) throw UsageError("config: repeats must be >= 1");
    require_placeholders("config: input_template", input_template, {});
    require_placeholders("config: encode_template", encode_template, {"input", "output", "qp", "height"});
    require_placeholders("config: decode_template", decode_template, {"input", "output"});
    require_placeholders("config: metric_template", metric_template, {"input", "output"});
}

Grid HarnessConfig::grid() const {
    Grid g{resolutions, qps};
    std::sort(g.resolutions.begin(), g.resolutions.end());
    std::sort(g.qps.begin(), g.qps.end());
    return g;
}

int HarnessConfig::width_for(int height) const {
    const long long num = static_cast<long long>(height) * aspect_width;
    long long w = (num + aspect_height / 2) / aspect_height;
    if (w % 2 != 0) ++w;
    return static_cast<int>(w);
}

HarnessConfig harness_config_from_json(const nlohmann::json& j) {
    HarnessConfig c = HarnessConfig::defaults();
    try {
        if (!j.is_object()) throw UsageError("config: expected a JSON object");
        static const char* known[] = {"resolutions",     "qps",          "aspect_ratio",    "input_template",
                                      "encode_template", "decode_template", "metric_template", "threads_per_job",
                                      "parallel_jobs",   "repeats",      "workdir",         "decode_time_source",
                                      "keep_intermediate", "version_commands"};
        for (const auto& [key, value] : j.items()) {
            if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; })) {
                throw UsageError("config: unknown key '" + key + "'");
            }
        }
        if (j.contains("resolutions")) c.resolutions = j.at("resolutions").get<std::vector<int>>();
        if (j.contains("qps")) c.qps = j.at("qps").get<std::vector<int>>();
        if (j.contains("aspect_ratio")) {
            auto ar = j.at("aspect_ratio").get<std::vector<int>>();
            if (ar.size() != 2) throw UsageError("config: aspect_ratio must be [width, height]");
            c.aspect_width = ar[0];
            c.aspect_height = ar[1];
        }
        if (j.contains("input_template")) c.input_template = j.at("input_template").get<std::string>();
        if (j.contains("encode_template")) c.encode_template = j.at("encode_template").get<std::string>();
        if (j.contains("decode_template")) c.decode_template = j.at("decode_template").get<std::string>();
        if (j.contains("metric_template")) c.metric_template = j.at("metric_template").get<std::string>();
        if (j.contains("threads_per_job")) c.threads_per_job = j.at("threads_per_job").get<int>();
        if (j.contains("parallel_jobs")) c.parallel_jobs = j.at("parallel_jobs").get<int>();
        if (j.contains("repeats")) c.repeats = j.at("repeats").get<int>();
        if (j.contains("workdir")) c.workdir = j.at("workdir").get<std::string>();
        if (j.contains("keep_intermediate")) c.keep_intermediate = j.at("keep_intermediate").get<bool>();
        if (j.contains("decode_time_source")) {
            const auto s = j.at("decode_time_source").get<std::string>();
            if (s == "wall") {
                c.decode_time_source = DecodeTimeSource::Wall;
            } else if (s == "tool") {
                c.decode_time_source = DecodeTimeSource::Tool;
            } else {
                throw UsageError("config: decode_time_source must be 'wall' or 'tool'");
            }
        }
        if (j.contains("version_commands")) {
            c.version_commands = j.at("version_commands").get<std::map<std::string, std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const HarnessConfig& c) {
    return nlohmann::json{
        {"resolutions", c.resolutions},
        {"qps", c.qps},
        {"aspect_ratio", {c.aspect_width, c.aspect_height}},
        {"input_template", c.input_template},
        {"encode_template", c.encode_template},
        {"decode_template", c.decode_template},
        {"metric_template", c.metric_template},
        {"threads_per_job", c.threads_per_job},
        {"parallel_jobs", c.parallel_jobs},
        {"repeats", c.repeats},
        {"workdir", c.workdir.string()},
        {"decode_time_source", c.decode_time_source == DecodeTimeSource::Wall ? "wall" : "tool"},
        {"keep_intermediate", c.keep_intermediate},
        {"version_commands", c.version_commands},
    };
}

HarnessConfig load_harness_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    auto config = harness_config_from_json(j);
    // Relative workdirs resolve against the config file's directory.
    if (config.workdir.is_relative()) {
        config.workdir = path.parent_path() / config.workdir;
    }
    return config;
}

EncodePoint JobResult::to_point() const {
    return EncodePoint{sequence, resolution, qp, bitrate_kbps, decode_time_s, psnr_db, xpsnr_db, vmaf};
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

nlohmann::json to_json(const JobResult& r) {
    return nlohmann::json{
        {"sequence", r.sequence},
        {"resolution", r.resolution},
        {"qp", r.qp},
        {"status", r.success ? "ok" : "failed"},
        {"bitstream_bytes", r.bitstream_bytes},
        {"bitrate_kbps", r.bitrate_kbps},
        {"decode_time_s", r.decode_time_s},
        {"psnr_db", optional_json(r.psnr_db)},
        {"xpsnr_db", optional_json(r.xpsnr_db)},
        {"vmaf", optional_json(r.vmaf)},
        {"stage", r.failed_stage},
        {"exit_status", r.exit_status},
        {"log", r.log},
    };
}

JobResult job_result_from_json(const nlohmann::json& j) {
    try {
        JobResult r;
        r.sequence = j.at("sequence").get<std::string>();
        r.resolution = j.at("resolution").get<int>();
        r.qp = j.at("qp").get<int>();
        r.success = j.at("status").get<std::string>() == "ok";
        r.bitstream_bytes = j.at("bitstream_bytes").get<std::uintmax_t>();
        r.bitrate_kbps = j.at("bitrate_kbps").get<double>();
        r.decode_time_s = j.at("decode_time_s").get<double>();
        r.psnr_db = optional_from(j, "psnr_db");
        r.xpsnr_db = optional_from(j, "xpsnr_db");
        r.vmaf = optional_from(j, "vmaf");
        r.failed_stage = j.value("stage", "");
        r.exit_status = j.value("exit_status", 0);
        r.log = j.value("log", "");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed job record: ") + e.what());
    }
}

ResumeManifest ResumeManifest::load(const fs::path& path) {
    ResumeManifest manifest;
    std::ifstream in(path);
    if (!in) {
        return manifest;
    }
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!trim(line).empty()) lines.push_back(std::move(line));
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        JobResult r;
        try {
            r = job_result_from_json(nlohmann::json::parse(lines[i]));
        } catch (const std::exception& e) {
            if (i + 1 == lines.size()) break;
            throw DataError("resume manifest '" + path.string() + "' record " + std::to_string(i + 1) +
                            " is corrupt: " + e.what());
        }
        auto it = std::find_if(manifest.results_.begin(), manifest.results_.end(), [&](const JobResult& x) {
            return x.sequence == r.sequence && x.resolution == r.resolution && x.qp == r.qp;
        });
        if (it != manifest.results_.end()) {
            *it = std::move(r);
        } else {
            manifest.results_.push_back(std::move(r));
        }
    }
    return manifest;
}

const JobResult* ResumeManifest::find(const std::string& sequence, int resolution, int qp) const {
    for (const auto& r : results_) {
        if (r.sequence == sequence && r.resolution == resolution && r.qp == qp) return &r;
    }
    return nullptr;
}

bool ResumeManifest::completed(const std::string& sequence, int resolution, int qp) const {
    const JobResult* r = find(sequence, resolution, qp);
    return r && r->success;
}

ManifestWriter::ManifestWriter(const fs::path& path, bool truncate) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    if (!truncate) {
        // Drop a torn final record (no trailing newline) left by a crash.
        std::ifstream probe(path, std::ios::binary);
        if (probe) {
            const std::string content((std::istreambuf_iterator<char>(probe)), std::istreambuf_iterator<char>());
            probe.close();
            if (!content.empty() && content.back() != '\n') {
                const auto keep = content.find_last_of('\n');
                fs::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
            }
        }
    }
    out_.open(path, truncate ? std::ios::trunc : std::ios::app);
    if (!out_) {
        throw DataError("cannot open resume manifest '" + path.string() + "'");
    }
}

void ManifestWriter::append(const JobResult& result) {
    std::lock_guard lock(mutex_);
    out_ << to_json(result).dump() << '\n';
    out_.flush();
}

std::vector<Job> plan_jobs(std::span<const SequenceId> sequences, const HarnessConfig& config,
                           const ResumeManifest* resume) {
    const Grid grid = config.grid();
    std::vector<SequenceId> ordered(sequences.begin(), sequences.end());
    std::sort(ordered.begin(), ordered.end(),
              [](const SequenceId& a, const SequenceId& b) { return a.name < b.name; });

    std::vector<Job> plan;
    plan.reserve(ordered.size() * grid.resolutions.size() * grid.qps.size());
    for (const auto& seq : ordered) {
        for (int r : grid.resolutions) {
            for (int q : grid.qps) {
                const bool done = resume && resume->completed(seq.name, r, q);
                plan.push_back({seq, r, q, done});
            }
        }
    }
    return plan;
}

CommandOutput run_command(const std::string& command) {
    const std::string wrapped = "( " + command + " ) 2>&1";
    FILE* pipe = ::popen(wrapped.c_str(), "r");
    if (!pipe) {
        throw ToolError("cannot spawn shell for: " + command);
    }
    CommandOutput out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        out.output.append(buf, n);
    }
    const int status = ::pclose(pipe);
    if (status == -1) {
        out.exit_status = -1;
    } else if (WIFEXITED(status)) {
        out.exit_status = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        out.exit_status = 128 + WTERMSIG(status);
    }
    return out;
}

double bitrate_kbps(std::uintmax_t bytes, double duration_s) {
    return static_cast<double>(bytes) * 8.0 / duration_s / 1000.0;
}

MetricValues parse_metric_output(const std::string& text) {
    static const std::regex token(R"((?:^|[^A-Za-z0-9_])(psnr|xpsnr|vmaf)\s*[:=]\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))",
                                  std::regex::icase);
    MetricValues values;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), token); it != std::sregex_iterator(); ++it) {
        std::string name = (*it)[1].str();
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        auto v = parse_double((*it)[2].str());
        if (!v) continue;
        if (name == "psnr") values.psnr_db = v;
        if (name == "xpsnr") values.xpsnr_db = v;
        if (name == "vmaf") values.vmaf = v;
    }
    return values;
}

std::optional<double> parse_reported_decode_time(const std::string& text) {
    static const std::regex token(R"(decode_time_s\s*[:=]\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))");
    std::smatch m;
    if (std::regex_search(text, m, token)) {
        return parse_double(m[1].str());
    }
    return std::nullopt;
}

namespace {

constexpr std::size_t kLogExcerpt = 2000;

std::string excerpt(const std::string& log) {
    if (log.size() <= kLogExcerpt) return log;
    return log.substr(log.size() - kLogExcerpt);
}

std::string expand(std::string tmpl, const Job& job, const HarnessConfig& config, const std::string& input,
                   const std::string& output, const std::string& source) {
    const int native_h = job.sequence.native_resolution;
    tmpl = substitute(std::move(tmpl), "input", input);
    tmpl = substitute(std::move(tmpl), "output", output);
    tmpl = substitute(std::move(tmpl), "source", source);
    tmpl = substitute(std::move(tmpl), "width", std::to_string(config.width_for(job.resolution)));
    tmpl = substitute(std::move(tmpl), "height", std::to_string(job.resolution));
    tmpl = substitute(std::move(tmpl), "native_width", std::to_string(config.width_for(native_h)));
    tmpl = substitute(std::move(tmpl), "native_height", std::to_string(native_h));
    tmpl = substitute(std::move(tmpl), "qp", std::to_string(job.qp));
    tmpl = substitute(std::move(tmpl), "threads", std::to_string(config.threads_per_job));
    tmpl = substitute(std::move(tmpl), "fps", job.sequence.frame_rate ? format_double(*job.sequence.frame_rate) : "");
    tmpl = substitute(std::move(tmpl), "frames",
                      job.sequence.frame_count ? std::to_string(*job.sequence.frame_count) : "");
    tmpl = substitute(std::move(tmpl), "sequence", job.sequence.name);
    return tmpl;
}

JobResult execute(const Job& job, const HarnessConfig& config) {
    JobResult result;
    result.sequence = job.sequence.name;
    result.resolution = job.resolution;
    result.qp = job.qp;

    auto fail = [&](std::string stage, const CommandOutput& out, std::string note = {}) {
        result.success = false;
        result.failed_stage = std::move(stage);
        result.exit_status = out.exit_status;
        if (out.exit_status == 127) note = "tool not found. " + note;
        result.log = excerpt(note + out.output);
        return result;
    };

    const auto duration = job.sequence.duration_s();
    if (!duration) {
        return fail("encode", {-1, ""}, "sequence lacks frame rate or frame count; ");
    }

    const fs::path dir = config.workdir / job.sequence.name;
    fs::create_directories(dir);
    const std::string stem = std::to_string(job.resolution) + "p_qp" + std::to_string(job.qp);
    const fs::path bitstream = dir / (stem + ".bit");
    const fs::path recon = dir / (stem + ".rec");
    const std::string source = substitute(config.input_template, "sequence", job.sequence.name);

    auto cleanup = [&] {
        if (!config.keep_intermediate) {
            std::error_code ec;
            fs::remove(bitstream, ec);
            fs::remove(recon, ec);
        }
    };

    const auto enc = run_command(expand(config.encode_template, job, config, source, bitstream.string(), source));
    if (enc.exit_status != 0) {
        cleanup();
        return fail("encode", enc);
    }
    std::error_code ec;
    const auto bytes = fs::file_size(bitstream, ec);
    if (ec || bytes == 0) {
        cleanup();
        return fail("encode", enc, "encoder produced no bitstream; ");
    }
    result.bitstream_bytes = bytes;
    result.bitrate_kbps = bitrate_kbps(bytes, *duration);

    double best = std::numeric_limits<double>::infinity();
    std::string decode_log;
    for (int i = 0; i < config.repeats; ++i) {
        const auto start = std::chrono::steady_clock::now();
        const auto dec =
            run_command(expand(config.decode_template, job, config, bitstream.string(), recon.string(), source));
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
        if (dec.exit_status != 0) {
            cleanup();
            return fail("decode", dec);
        }
        double t = wall.count();
        if (config.decode_time_source == DecodeTimeSource::Tool) {
            auto reported = parse_reported_decode_time(dec.output);
            if (!reported) {
                cleanup();
                return fail("decode", dec, "decoder did not report decode_time_s; ");
            }
            t = *reported;
        }
        best = std::min(best, t);
        decode_log = dec.output;
    }
    result.decode_time_s = best;

    const auto met = run_command(expand(config.metric_template, job, config, source, recon.string(), source));
    cleanup();
    if (met.exit_status != 0) {
        return fail("metric", met);
    }
    const auto values = parse_metric_output(met.output);
    if (!values.psnr_db && !values.xpsnr_db && !values.vmaf) {
        return fail("metric", met, "unparseable metric output; ");
    }
    result.psnr_db = values.psnr_db;
    result.xpsnr_db = values.xpsnr_db;
    result.vmaf = values.vmaf;
    if (!(result.decode_time_s > 0.0)) {
        return fail("decode", {0, decode_log}, "non-positive decode time; ");
    }
    result.success = true;
    result.log = excerpt(enc.output + decode_log + met.output);
    return result;
}

} // namespace

std::vector<JobResult> run_jobs(std::span<const Job> plan, const HarnessConfig& config, ManifestWriter* manifest,
                                const RunOptions& options) {
    config.validate();
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (!plan[i].skippable) pending.push_back(i);
    }
    std::size_t budget = pending.size();
    if (options.max_jobs) budget = std::min(budget, *options.max_jobs);

    std::vector<std::optional<JobResult>> slots(budget);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= budget) return;
            if (options.stop && options.stop->load()) return;
            const Job& job = plan[pending[k]];
            JobResult r;
            try {
                r = execute(job, config);
            } catch (const std::exception& e) {
                r.sequence = job.sequence.name;
                r.resolution = job.resolution;
                r.qp = job.qp;
                r.failed_stage = "encode";
                r.exit_status = -1;
                r.log = e.what();
            }
            if (!r.success && options.stop && options.stop->load()) continue;
            if (manifest) manifest->append(r);
            slots[k] = std::move(r);
        }
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallel_jobs), budget);
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
        threads.emplace_back(worker);
    }
    threads.clear();

    std::vector<JobResult> results;
    results.reserve(budget);
    for (auto& s : slots)
        if (s) results.push_back(std::move(*s));
    return results;
}

void export_measurements(std::span<const JobResult> results, std::ostream& csv, std::ostream& failures) {
    const auto successes = std::count_if(results.begin(), results.end(), [](const JobResult& r) { return r.success; });
    if (successes == 0) {
        throw DataError("no successful jobs to export");
    }
    csv << kMeasurementHeader << '\n';
    failures << kFailureHeader << '\n';
    for (const auto& r : results) {
        if (r.success) {
            write_measurement_row(csv, r.to_point());
        } else {
            failures << r.sequence << ',' << r.resolution << ',' << r.qp << ',' << r.failed_stage << ','
                     << r.exit_status << '\n';
        }
    }
}

} // namespace rqt
