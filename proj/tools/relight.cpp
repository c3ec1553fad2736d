// Command-line front end: photo/video enhancement and the evaluation metrics.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 argument validation
// failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relight/image_io.hpp"
#include "relight/metrics.hpp"
#include "relight/photo.hpp"
#include "relight/video.hpp"

namespace fs = std::filesystem;
using namespace relight;

namespace {

struct PhotoArgs {
    std::string input, output;
    std::string dump_illum, report;
    bool naive = false;
    bool per_channel = false;
    bool overexposure = false;
};

struct VideoArgs {
    std::string input_dir, output_dir;
    std::string pattern = "frame_%05d.png";
    double denoise = 0.5;
    bool keyframes_only = false;
};

struct Options {
    SolverConfig solver;
    JbuParams jbu;
    PropagationConfig prop;
    PhotoArgs photo;
    VideoArgs video;
};

void add_solver_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--lambda", opt.solver.lambda, "smoothness weight")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--gamma", opt.solver.gamma.gamma, "Gamma adjustment exponent")
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
                double v = 0.0;
                try {
                    v = std::stod(s);
                } catch (...) {
                    return "gamma must be in (0,1]";
                }
                if (!(v > 0.0 && v <= 1.0)) return "gamma must be in (0,1]";
                return {};
            },
            "GAMMA"))
        ->capture_default_str();
    cmd->add_option("--tau", opt.solver.tau, "edge threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-dim", opt.jbu.max_dim, "downsample target for the fast path")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->set_config("--config", "", "plain key=value config file, overridden by explicit flags");
}

std::string frame_path(const std::string& dir, const std::string& pattern, int index) {
    char name[512];
    std::snprintf(name, sizeof name, pattern.c_str(), index);
    return (fs::path(dir) / name).string();
}

void write_report(const std::string& path, const SolveReport& report, double de_in, double de_out,
                  long wall_ms) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char buf[64];
    out << "outer_iterations=" << report.outer_iterations << "\n";
    std::snprintf(buf, sizeof buf, "%.4f", de_in);
    out << "de_in=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.4f", de_out);
    out << "de_out=" << buf << "\n";
    out << "clamped_pixels=" << report.clamped_pixels << "\n";
    out << "residual_edge_violations=" << report.residual_edge_violations << "\n";
    out << "wall_ms=" << wall_ms << "\n";
}

int run_photo(const Options& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const RgbImage input = load_image(opt.photo.input);
    check_image(input);

    RgbImage output;
    ScalarField illum;
    SolveReport report;
    bool have_illum = false;

    if (opt.photo.overexposure) {
        output = correct_overexposure(input, opt.solver, opt.jbu, &report);
    } else if (opt.photo.per_channel) {
        output = enhance_per_channel(input, opt.solver, opt.jbu, &report);
    } else {
        const EnhanceMode mode = opt.photo.naive ? EnhanceMode::naive : EnhanceMode::fast;
        EnhanceResult res = enhance_photo(input, opt.solver, opt.jbu, mode);
        output = std::move(res.image);
        illum = std::move(res.S);
        report = std::move(res.report);
        have_illum = true;
    }

    save_image(output, opt.photo.output);
    if (!opt.photo.dump_illum.empty()) {
        if (!have_illum)
            throw std::runtime_error("--dump-illum requires the single-illumination modes");
        dump_scalar_field(illum, opt.photo.dump_illum);
    }
    if (!opt.photo.report.empty()) {
        const auto t1 = std::chrono::steady_clock::now();
        const long ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        write_report(opt.photo.report, report, discrete_entropy(input), discrete_entropy(output),
                     ms);
    }
    return 0;
}

int run_video(const Options& opt) {
    if (!fs::is_directory(opt.video.input_dir))
        throw std::runtime_error("not a directory: " + opt.video.input_dir);

    // Frames are numbered consecutively from 0 or 1; a gap is an error.
    int start = 0;
    if (!fs::exists(frame_path(opt.video.input_dir, opt.video.pattern, 0))) start = 1;
    VideoSequence video;
    int index = start;
    while (true) {
        const std::string path = frame_path(opt.video.input_dir, opt.video.pattern, index);
        if (!fs::exists(path)) break;
        video.frames.push_back(load_image(path));
        ++index;
    }
    if (video.frames.empty())
        throw std::runtime_error("no frames matching pattern in " + opt.video.input_dir);
    const size_t on_disk = static_cast<size_t>(std::count_if(
        fs::directory_iterator(opt.video.input_dir), fs::directory_iterator{},
        [](const fs::directory_entry& e) { return e.is_regular_file(); }));
    if (on_disk > video.frames.size())
        throw std::runtime_error("misnumbered frames in " + opt.video.input_dir);
    check_video(video);

    if (opt.video.keyframes_only) {
        const KeyframeIndex keys = extract_keyframes(video, opt.prop);
        for (size_t i = 0; i < keys.indices.size(); ++i)
            std::cout << (i ? " " : "") << keys.indices[i];
        std::cout << "\n";
        return 0;
    }

    const VideoSequence enhanced =
        enhance_video(video, opt.solver, opt.jbu, opt.prop, opt.video.denoise);
    fs::create_directories(opt.video.output_dir);
    for (size_t t = 0; t < enhanced.frames.size(); ++t)
        save_image(enhanced.frames[t],
                   frame_path(opt.video.output_dir, opt.video.pattern, start + static_cast<int>(t)));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underexposed photo and video enhancement via constrained illumination estimation"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* enhance = app.add_subcommand("enhance", "enhance a photo or a frame sequence");
    enhance->require_subcommand(1);

    CLI::App* photo = enhance->add_subcommand("photo", "enhance a single image");
    photo->add_option("input", opt.photo.input, "input image (PNG or PPM)")->required();
    photo->add_option("output", opt.photo.output, "output image path")->required();
    add_solver_flags(photo, opt);
    photo->add_flag("--naive", opt.photo.naive, "full-resolution solve (no downsampling)");
    photo->add_flag("--per-channel", opt.photo.per_channel,
                    "independent per-channel illumination (color-constancy variant)");
    photo->add_flag("--overexposure", opt.photo.overexposure,
                    "correct an overexposed image by inversion");
    photo->add_option("--dump-illum", opt.photo.dump_illum,
                      "write the illumination map (PNG + raw float raster)");
    photo->add_option("--report", opt.photo.report, "write key=value solve telemetry");
    photo->get_option("--per-channel")->excludes(photo->get_option("--overexposure"));
    photo->get_option("--dump-illum")->excludes(photo->get_option("--per-channel"));
    photo->get_option("--dump-illum")->excludes(photo->get_option("--overexposure"));

    CLI::App* video = enhance->add_subcommand("video", "enhance a numbered frame sequence");
    video->add_option("input-dir", opt.video.input_dir, "directory of numbered frames")->required();
    video->add_option("output-dir", opt.video.output_dir, "output directory")->required();
    add_solver_flags(video, opt);
    video->add_option("--pattern", opt.video.pattern, "printf-style frame name pattern")
        ->capture_default_str();
    video->add_option("--ell", opt.prop.keyframe_ell, "keyframe luminance threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    video->add_option("--kf-ratio", opt.prop.keyframe_ratio, "keyframe pixel-fraction threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    video->add_option("--window", opt.prop.window_n, "propagation search window side length")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    video->add_option("--parzen-d", opt.prop.parzen_d, "Parzen kernel width (8-bit luminance)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    video->add_option("--denoise", opt.video.denoise, "temporal blend strength, 0 disables")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    video->add_flag("--keyframes-only", opt.video.keyframes_only,
                    "print keyframe indices and exit");

    CLI::App* metrics = app.add_subcommand("metrics", "image quality metrics");
    metrics->require_subcommand(1);
    std::string m_a, m_b;
    CLI::App* de = metrics->add_subcommand("de", "discrete entropy of an image");
    de->add_option("image", m_a, "input image")->required();
    CLI::App* psnr_cmd = metrics->add_subcommand("psnr", "PSNR between two images");
    psnr_cmd->add_option("a", m_a, "first image")->required();
    psnr_cmd->add_option("b", m_b, "second image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (photo->parsed()) return run_photo(opt);
        if (video->parsed()) return run_video(opt);
        if (de->parsed()) {
            std::printf("DE=%.3f\n", discrete_entropy(load_image(m_a)));
            return 0;
        }
        if (psnr_cmd->parsed()) {
            std::printf("PSNR=%.3f\n", psnr(load_image(m_a), load_image(m_b)));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
