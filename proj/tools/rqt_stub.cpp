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

// Deterministic fake encoder/decoder/metric tool for exercising the harness
// without a codec installed. All outputs derive from rqt::synthetic::model.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "rqt/synthetic.hpp"
#include "rqt/text.hpp"

namespace fs = std::filesystem;

namespace {

struct Header {
    std::string sequence;
    int height = 0;
    int qp = 0;
    double fps = 0.0;
    long long frames = 0;
    std::uint64_t seed = 0;
};

constexpr const char* kMagic = "RQTSTUB";

std::string header_line(const Header& h) {
    std::ostringstream os;
    os << kMagic << ' ' << h.sequence << ' ' << h.height << ' ' << h.qp << ' ' << rqt::format_double(h.fps) << ' '
       << h.frames << ' ' << h.seed << '\n';
    return os.str();
}

Header read_header(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    Header h;
    if (!(in >> magic >> h.sequence >> h.height >> h.qp >> h.fps >> h.frames >> h.seed) || magic != kMagic) {
        throw std::runtime_error("not a stub bitstream: " + path.string());
    }
    return h;
}

rqt::synthetic::Encode model_of(const Header& h) {
    return rqt::synthetic::model(h.sequence, h.height, h.qp, h.fps, h.frames, h.seed);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic stub toolchain for rqtpf harness tests"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", "rqt-stub 1.0");

    Header enc;
    std::string enc_in;
    std::string enc_out;
    auto* encode = app.add_subcommand("encode", "write a bitstream whose size follows the synthetic rate model");
    encode->add_option("--sequence", enc.sequence)->required();
    encode->add_option("--height", enc.height)->required();
    encode->add_option("--qp", enc.qp)->required();
    encode->add_option("--fps", enc.fps)->required();
    encode->add_option("--frames", enc.frames)->required();
    encode->add_option("--seed", enc.seed);
    encode->add_option("--input", enc_in, "source path (not read)");
    encode->add_option("--output", enc_out)->required();

    std::string dec_in, dec_out;
    auto* decode = app.add_subcommand("decode", "copy the stream header and report a modelled decode time");
    decode->add_option("--input", dec_in)->required();
    decode->add_option("--output", dec_out)->required();

    std::string met_src, met_rec;
    auto* metric = app.add_subcommand("metric", "print modelled psnr/xpsnr/vmaf for a reconstruction");
    metric->add_option("--source", met_src);
    metric->add_option("--recon", met_rec)->required();

    std::string probe_dir;
    int probe_ms = 50;
    auto* probe = app.add_subcommand("probe", "record how many probes run concurrently in a directory");
    probe->add_option("--dir", probe_dir)->required();
    probe->add_option("--ms", probe_ms);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*encode) {
            const auto e = model_of(enc);
            const double duration = static_cast<double>(enc.frames) / enc.fps;
            const auto bytes = static_cast<std::uintmax_t>(std::llround(e.bitrate_kbps * 1000.0 / 8.0 * duration));
            {
                std::ofstream out(enc_out, std::ios::binary | std::ios::trunc);
                out << header_line(enc);
            }
            // Sparse padding keeps large synthetic bitstreams cheap on disk.
            fs::resize_file(enc_out, std::max<std::uintmax_t>(bytes, fs::file_size(enc_out)));
        } else if (*decode) {
            const Header h = read_header(dec_in);
            std::ofstream out(dec_out, std::ios::binary | std::ios::trunc);
            out << header_line(h);
            std::cout << "decode_time_s=" << rqt::format_double(model_of(h).decode_time_s) << '\n';
        } else if (*metric) {
            const auto e = model_of(read_header(met_rec));
            std::cout << "psnr=" << rqt::format_double(e.psnr_db) << '\n'
                      << "xpsnr=" << rqt::format_double(e.xpsnr_db) << '\n'
                      << "vmaf=" << rqt::format_double(e.vmaf) << '\n';
        } else if (*probe) {
            const fs::path dir(probe_dir);
            fs::create_directories(dir);
            const fs::path mine = dir / (std::to_string(::getpid()) + ".active");
            std::ofstream(mine).put('x');
            std::size_t active = 0;
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (entry.path().extension() == ".active") ++active;
            }
            {
                std::ofstream log(dir / "observed.log", std::ios::app);
                log << active << '\n';
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(probe_ms));
            fs::remove(mine);
        } else {
            std::cerr << app.help();
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "rqt-stub: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
