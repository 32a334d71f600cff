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

#include "rqt/cli.hpp"

#include <signal.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rqt/errors.hpp"
#include "rqt/evaluation.hpp"
#include "rqt/harness.hpp"
#include "rqt/ladder.hpp"
#include "rqt/measurements.hpp"
#include "rqt/pareto.hpp"
#include "rqt/run_manifest.hpp"
#include "rqt/text.hpp"

namespace rqt::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void request_stop(int) { g_stop.store(true); }

// Routes SIGINT and SIGTERM to g_stop for the lifetime of the guard.
class StopSignals {
public:
    StopSignals() {
        g_stop.store(false);
        struct sigaction sa {};
        sa.sa_handler = request_stop;
        sigemptyset(&sa.sa_mask);
        ::sigaction(SIGINT, &sa, &old_int_);
        ::sigaction(SIGTERM, &sa, &old_term_);
    }
    ~StopSignals() {
        ::sigaction(SIGINT, &old_int_, nullptr);
        ::sigaction(SIGTERM, &old_term_, nullptr);
    }
    StopSignals(const StopSignals&) = delete;
    StopSignals& operator=(const StopSignals&) = delete;

private:
    struct sigaction old_int_ {};
    struct sigaction old_term_ {};
};

struct GlobalOptions {
    int jobs = 1;
    std::string config;
    std::string out;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is
// rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
    {
        std::vector<std::jthread> threads;
        for (std::size_t i = 1; i < workers; ++i) threads.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);
}

std::ifstream open_input(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError(std::string("cannot open ") + what + " '" + path + "'");
    }
    return in;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

std::string require_out(const GlobalOptions& g, const char* command) {
    if (g.out.empty()) throw UsageError(std::string(command) + " requires --out");
    return g.out;
}

Grid grid_from(const GlobalOptions& g) {
    if (g.config.empty()) return Grid::defaults();
    return load_harness_config(g.config).grid();
}

std::vector<MeasurementSet> load_measurements(const std::string& path, const std::string& sequences,
                                              const Grid& grid) {
    std::vector<SequenceId> metadata;
    if (!sequences.empty()) {
        auto in = open_input(sequences, "sequence metadata");
        metadata = parse_sequence_metadata(in, grid);
    }
    auto in = open_input(path, "measurements");
    return parse_measurements(in, grid, metadata);
}

std::vector<Ladder> load_ladders(const std::string& path) {
    auto in = open_input(path, "ladder file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("ladder file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.contains("ladders") || !j.at("ladders").is_array()) {
        throw DataError("ladder file '" + path + "' has no 'ladders' array");
    }
    std::vector<Ladder> ladders;
    for (const auto& l : j.at("ladders")) ladders.push_back(ladder_from_json(l));
    if (ladders.empty()) throw DataError("ladder file '" + path + "' contains no ladders");
    for (const auto& l : ladders) {
        if (!(l.method == ladders.front().method)) {
            throw DataError("ladder file '" + path + "' mixes methods");
        }
    }
    return ladders;
}

fs::path manifest_path_for(const fs::path& out_file) {
    return fs::path(out_file.string() + ".manifest.json");
}

// ---------------------------------------------------------------- measure

struct MeasureArgs {
    std::string sequences;
    bool resume = false;
    std::size_t max_jobs = 0;
};

int cmd_measure(const MeasureArgs& a, const GlobalOptions& g, bool jobs_given, std::ostream& out,
                std::ostream& err) {
    if (g.config.empty()) throw UsageError("measure requires --config");
    if (!fs::exists(g.config)) throw UsageError("config file '" + g.config + "' not found");
    const fs::path out_dir = require_out(g, "measure");

    HarnessConfig config = load_harness_config(g.config);
    if (jobs_given) config.parallel_jobs = g.jobs;
    const Grid grid = config.grid();

    auto seq_in = open_input(a.sequences, "sequence metadata");
    const auto sequences = parse_sequence_metadata(seq_in, grid);

    fs::create_directories(out_dir);
    const fs::path resume_path = out_dir / "resume_manifest.jsonl";
    const ResumeManifest prior = a.resume ? ResumeManifest::load(resume_path) : ResumeManifest{};
    ManifestWriter writer(resume_path, !a.resume);

    const auto plan = plan_jobs(sequences, config, &prior);
    RunOptions options;
    if (a.max_jobs > 0) options.max_jobs = a.max_jobs;
    options.stop = &g_stop;
    const auto fresh = [&] {
        StopSignals guard;
        return run_jobs(plan, config, &writer, options);
    }();

    std::map<std::tuple<std::string, int, int>, const JobResult*> by_key;
    for (const auto& r : fresh) by_key[{r.sequence, r.resolution, r.qp}] = &r;

    std::vector<JobResult> results;
    std::size_t remaining = 0;
    for (const auto& job : plan) {
        if (job.skippable) {
            results.push_back(*prior.find(job.sequence.name, job.resolution, job.qp));
            continue;
        }
        auto it = by_key.find({job.sequence.name, job.resolution, job.qp});
        if (it == by_key.end()) {
            ++remaining;
        } else {
            results.push_back(*it->second);
        }
    }
    if (remaining > 0) {
        err << "rqtpf: run interrupted with " << remaining << " of " << plan.size()
            << " jobs remaining; rerun with --resume\n";
        return kInterrupted;
    }

    std::ostringstream csv, failures, seqs;
    try {
        export_measurements(results, csv, failures);
    } catch (const DataError& e) {
        err << "rqtpf: " << e.what() << '\n';
        if (!results.empty()) {
            const auto& r = results.front();
            err << "  first failure: " << r.sequence << ' ' << r.resolution << "p qp " << r.qp << ": "
                << r.failed_stage << " failed (exit " << r.exit_status << ")\n";
        }
        return kTool;
    }
    write_sequence_metadata(seqs, sequences);
    write_text(out_dir / "measurements.csv", csv.str());
    write_text(out_dir / "failures.csv", failures.str());
    write_text(out_dir / "sequences.csv", seqs.str());

    RunManifest manifest;
    manifest.command = "measure";
    manifest.config = to_json(config);
    manifest.add_input(g.config);
    manifest.add_input(a.sequences);
    for (const auto& [tool, command] : config.version_commands) {
        const auto v = run_command(command);
        manifest.tool_versions[tool] = std::string(trim(v.output.substr(0, v.output.find('\n'))));
    }
    manifest.add_output(out_dir / "measurements.csv");
    manifest.add_output(out_dir / "failures.csv");
    manifest.add_output(out_dir / "sequences.csv");
    manifest.write(out_dir / "run_manifest.json");

    const auto failed = std::count_if(results.begin(), results.end(), [](const JobResult& r) { return !r.success; });
    out << "measured " << (results.size() - static_cast<std::size_t>(failed)) << " encodes";
    if (failed > 0) {
        out << ", " << failed << " failed (see failures.csv)\n";
        return kTool;
    }
    out << '\n';
    return kOk;
}

// ---------------------------------------------------------------- ladder

struct LadderArgs {
    std::string measurements;
    std::string sequences;
    std::string method;
    std::optional<double> alpha;
    std::string metric = "xpsnr";
    bool metric_given = false;
    std::string targets;
    std::string fixed_spec;
};

int cmd_ladder(const LadderArgs& a, const GlobalOptions& g, std::ostream& out) {
    const fs::path out_file = require_out(g, "ladder");
    const MethodTag tag = parse_method(a.method, a.alpha);
    const QualityMetric metric = parse_quality_metric(a.metric);
    if (tag.kind == LadderMethod::DynRes && a.metric_given && metric != QualityMetric::Xpsnr) {
        throw UsageError("dynres always ranks by xpsnr");
    }
    const TargetBitrateSet targets = a.targets.empty() ? TargetBitrateSet::defaults() : parse_targets(a.targets);
    const Grid grid = grid_from(g);

    FixedLadderSpec fixed = FixedLadderSpec::defaults();
    if (!a.fixed_spec.empty()) {
        auto in = open_input(a.fixed_spec, "fixed ladder specification");
        fixed = parse_fixed_spec(in);
    }
    if (tag.kind == LadderMethod::Fixed) fixed.validate(grid);

    const auto sets = load_measurements(a.measurements, a.sequences, grid);
    std::vector<Ladder> ladders(sets.size());
    parallel_for(sets.size(), g.jobs, [&](std::size_t i) {
        const auto& set = sets[i];
        switch (tag.kind) {
        case LadderMethod::RqtPf:
            ladders[i] = build_rqt_pf_ladder(set, *tag.alpha, metric, targets);
            break;
        case LadderMethod::QtPf:
            ladders[i] = build_qt_pf_ladder(set, metric, targets);
            break;
        case LadderMethod::DynRes:
            ladders[i] = build_dynres_ladder(set, targets);
            break;
        case LadderMethod::Default:
            ladders[i] = build_default_ladder(set, metric, targets);
            break;
        case LadderMethod::Fixed:
            ladders[i] = build_fixed_ladder(set, fixed, metric);
            break;
        }
    });

    RunManifest manifest;
    manifest.command = "ladder";
    manifest.config = {{"method", tag.cli_name()},
                       {"alpha", tag.alpha ? nlohmann::json(tag.alpha->value()) : nlohmann::json(nullptr)},
                       {"quality_metric", std::string(to_string(metric))},
                       {"targets_mbps", std::vector<double>(targets.values().begin(), targets.values().end())},
                       {"resolutions", grid.resolutions},
                       {"qps", grid.qps}};
    if (tag.kind == LadderMethod::Fixed) {
        auto entries = nlohmann::json::array();
        for (const auto& e : fixed.entries) entries.push_back({e.target_mbps, e.resolution});
        manifest.config["fixed_spec"] = entries;
    }
    manifest.add_input(a.measurements);
    if (!a.sequences.empty()) manifest.add_input(a.sequences);

    nlohmann::json doc;
    doc["run_id"] = manifest.run_id();
    doc["ladders"] = nlohmann::json::array();
    for (const auto& l : ladders) doc["ladders"].push_back(to_json(l));
    write_text(out_file, doc.dump(2) + "\n");
    manifest.add_output(out_file);
    manifest.write(manifest_path_for(out_file));

    out << "wrote " << ladders.size() << " " << tag.label() << " ladders to " << out_file.string() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- front

struct FrontArgs {
    std::string measurements;
    std::string sequences;
    std::string space = "mv";
    std::optional<double> alpha;
    std::string metric = "xpsnr";
};

int cmd_front(const FrontArgs& a, const GlobalOptions& g, std::ostream& out) {
    const fs::path out_file = require_out(g, "front");
    if (a.space != "mv" && a.space != "3d") throw UsageError("--space must be mv or 3d");
    std::optional<Alpha> alpha;
    if (a.space == "mv") {
        if (!a.alpha) throw UsageError("--space mv requires --alpha");
        alpha = Alpha(*a.alpha);
    } else if (a.alpha) {
        throw UsageError("--alpha is not used with --space 3d");
    }
    const QualityMetric metric = parse_quality_metric(a.metric);
    const Grid grid = grid_from(g);
    const auto sets = load_measurements(a.measurements, a.sequences, grid);

    std::vector<nlohmann::json> fronts(sets.size());
    parallel_for(sets.size(), g.jobs, [&](std::size_t i) {
        const auto front = alpha ? pareto_front_mv(sets[i], *alpha, metric) : pareto_front_3d(sets[i], metric);
        fronts[i] = to_json(front, sets[i].sequence().name);
    });

    RunManifest manifest;
    manifest.command = "front";
    manifest.config = {{"space", a.space},
                       {"alpha", alpha ? nlohmann::json(alpha->value()) : nlohmann::json(nullptr)},
                       {"quality_metric", std::string(to_string(metric))}};
    manifest.add_input(a.measurements);
    if (!a.sequences.empty()) manifest.add_input(a.sequences);

    nlohmann::json doc{{"run_id", manifest.run_id()}, {"fronts", fronts}};
    write_text(out_file, doc.dump(2) + "\n");
    manifest.add_output(out_file);
    manifest.write(manifest_path_for(out_file));
    out << "wrote " << fronts.size() << " fronts to " << out_file.string() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    std::vector<std::string> methods;
    std::string reference;
};

int cmd_compare(const CompareArgs& a, const GlobalOptions& g, std::ostream& out) {
    const fs::path out_file = require_out(g, "compare");
    const auto reference = load_ladders(a.reference);
    std::map<std::string, const Ladder*> ref_by_seq;
    for (const auto& l : reference) ref_by_seq[l.sequence] = &l;

    RunManifest manifest;
    manifest.command = "compare";
    manifest.add_input(a.reference);

    nlohmann::json methods = nlohmann::json::array();
    std::vector<ComparisonReport> rows;
    for (const auto& path : a.methods) {
        const auto ladders = load_ladders(path);
        manifest.add_input(path);
        std::vector<std::pair<const Ladder*, const Ladder*>> pairs;
        for (const auto& l : ladders) {
            auto it = ref_by_seq.find(l.sequence);
            if (it != ref_by_seq.end()) pairs.emplace_back(&l, it->second);
        }
        if (pairs.empty()) {
            throw DataError("'" + path + "' shares no sequence with reference '" + a.reference + "'");
        }
        std::vector<ComparisonReport> per_sequence(pairs.size());
        parallel_for(pairs.size(), g.jobs,
                     [&](std::size_t i) { per_sequence[i] = compare_ladders(*pairs[i].first, *pairs[i].second); });
        const auto aggregate = aggregate_report(per_sequence);
        rows.push_back(aggregate);

        nlohmann::json entry{{"method", aggregate.method}, {"aggregate", to_json(aggregate)}};
        entry["per_sequence"] = nlohmann::json::array();
        for (const auto& r : per_sequence) entry["per_sequence"].push_back(to_json(r));
        methods.push_back(std::move(entry));
    }

    const std::string table = format_table(rows);
    nlohmann::json doc{{"run_id", manifest.run_id()},
                       {"reference", reference.front().method.label()},
                       {"methods", std::move(methods)}};
    fs::path table_file = out_file;
    table_file.replace_extension(".txt");
    if (table_file == out_file) table_file = fs::path(out_file.string() + ".txt");
    write_text(out_file, doc.dump(2) + "\n");
    write_text(table_file, "Reference: " + reference.front().method.label() + "\n" + table);
    manifest.add_output(out_file);
    manifest.add_output(table_file);
    manifest.write(manifest_path_for(out_file));
    out << table;
    return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::vector<std::string> ladders;
    std::string fields = "decode_time,bitrate,xpsnr,vmaf";
    int bins = 20;
};

int cmd_report(const ReportArgs& a, const GlobalOptions& g, std::ostream& out) {
    const fs::path out_dir = require_out(g, "report");
    if (a.ladders.empty()) throw UsageError("report needs at least one ladder file");
    if (a.bins < 1) throw UsageError("--bins must be positive");
    std::vector<LadderField> fields;
    for (auto f : split(a.fields, ',')) fields.push_back(parse_ladder_field(trim(f)));

    RunManifest manifest;
    manifest.command = "report";
    manifest.config = {{"fields", a.fields}, {"bins", a.bins}};

    std::vector<std::pair<std::string, std::vector<Ladder>>> methods;
    std::set<std::string> keys;
    for (const auto& path : a.ladders) {
        auto ladders = load_ladders(path);
        manifest.add_input(path);
        const std::string key = ladders.front().method.key();
        if (!keys.insert(key).second) throw UsageError("method '" + key + "' given twice");
        methods.emplace_back(key, std::move(ladders));
    }

    fs::create_directories(out_dir);
    std::size_t written = 0;
    for (LadderField field : fields) {
        // A shared range per field keeps the methods' densities comparable.
        double lo = 0.0, hi = 0.0;
        bool first = true;
        std::vector<std::vector<double>> pooled;
        for (const auto& [key, ladders] : methods) {
            pooled.push_back(pooled_values(ladders, field));
            auto [mn, mx] = std::minmax_element(pooled.back().begin(), pooled.back().end());
            lo = first ? *mn : std::min(lo, *mn);
            hi = first ? *mx : std::max(hi, *mx);
            first = false;
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const auto h = histogram_of(pooled[m], a.bins, std::make_pair(lo, hi));
            std::ostringstream csv;
            write_histogram_csv(csv, h);
            const fs::path file = out_dir / (methods[m].first + "_" + std::string(to_string(field)) + ".csv");
            write_text(file, csv.str());
            manifest.add_output(file);
            ++written;
        }
    }
    manifest.write(out_dir / "run_manifest.json");
    out << "wrote " << written << " histograms to " << out_dir.string() << '\n';
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bitrate ladder construction from rate-quality-decoding-time Pareto fronts"};
    app.name("rqtpf");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    auto* jobs_opt = app.add_option("--jobs", g.jobs, "parallel units (sequences or encode jobs)")
                         ->check(CLI::PositiveNumber);
    app.add_option("--config", g.config, "harness configuration JSON");
    app.add_option("--out", g.out, "output file or directory");

    MeasureArgs measure_args;
    auto* measure = app.add_subcommand("measure", "run the encode/decode/metric grid and write measurements");
    measure->add_option("--sequences", measure_args.sequences, "sequence metadata CSV")->required();
    measure->add_flag("--resume", measure_args.resume, "continue from the resume manifest in --out");
    measure->add_option("--max-jobs", measure_args.max_jobs, "stop after this many jobs (0 = no limit)");

    LadderArgs ladder_args;
    auto* ladder = app.add_subcommand("ladder", "build one bitrate ladder per sequence");
    ladder->add_option("--measurements", ladder_args.measurements)->required();
    ladder->add_option("--sequences", ladder_args.sequences, "sequence metadata CSV");
    ladder->add_option("--method", ladder_args.method, "rqt-pf, qt-pf, dynres, fixed or default")->required();
    ladder->add_option("--alpha", ladder_args.alpha, "decode-time weight in [0, 1] (rqt-pf only)");
    auto* ladder_metric = ladder->add_option("--metric", ladder_args.metric, "psnr, xpsnr or vmaf");
    ladder->add_option("--targets", ladder_args.targets, "comma-separated target bitrates in Mbps");
    ladder->add_option("--fixed-spec", ladder_args.fixed_spec, "CSV target_mbps,resolution");

    FrontArgs front_args;
    auto* front = app.add_subcommand("front", "write per-sequence Pareto fronts");
    front->add_option("--measurements", front_args.measurements)->required();
    front->add_option("--sequences", front_args.sequences, "sequence metadata CSV");
    front->add_option("--space", front_args.space, "mv or 3d");
    front->add_option("--alpha", front_args.alpha, "decode-time weight in [0, 1] (mv only)");
    front->add_option("--metric", front_args.metric, "psnr, xpsnr or vmaf");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "BD metrics and decode-time delta against a reference ladder");
    compare->add_option("--method-ladders", compare_args.methods, "ladder files to evaluate")->required();
    compare->add_option("--reference", compare_args.reference, "reference ladder file")->required();

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "histograms of ladder fields per method");
    report->add_option("--ladders", report_args.ladders, "ladder files")->required();
    report->add_option("--fields", report_args.fields, "comma-separated fields");
    report->add_option("--bins", report_args.bins, "histogram bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*measure) return cmd_measure(measure_args, g, jobs_opt->count() > 0, out, err);
        if (*ladder) {
            ladder_args.metric_given = ladder_metric->count() > 0;
            return cmd_ladder(ladder_args, g, out);
        }
        if (*front) return cmd_front(front_args, g, out);
        if (*compare) return cmd_compare(compare_args, g, out);
        if (*report) return cmd_report(report_args, g, out);
    } catch (const UsageError& e) {
        err << "rqtpf: " << e.what() << '\n';
        return kUsage;
    } catch (const ToolError& e) {
        err << "rqtpf: " << e.what() << '\n';
        return kTool;
    } catch (const std::exception& e) {
        err << "rqtpf: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

} // namespace rqt::cli
