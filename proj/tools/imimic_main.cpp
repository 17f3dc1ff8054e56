#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imimic/image_io.hpp"
#include "imimic/pipeline.hpp"

namespace {

using namespace imimic;

int exit_code_for(ErrorCode code) {
    switch (error_class(code)) {
        case ErrorClass::Io: return 2;
        case ErrorClass::Config: return 3;
        case ErrorClass::Pipeline: return 4;
    }
    return 4;
}

// Flags override config-file values, which override built-in defaults. With
// no --config the IMIMIC_CONFIG environment variable is consulted.
struct ConfigFlags {
    std::string config_path;
    std::optional<int> window, threshold, blur_kernel, links;
    std::optional<double> blur_sigma, eta_threshold, area_fraction, fps;
    std::optional<double> initial_angle, length_ratio, angular_velocity_ratio, inertia;
    std::optional<double> joint_min, joint_max, max_speed;
    std::string debug_dir;

    void add_to(CLI::App& app) {
        app.add_option("--config", config_path, "key = value configuration file");
        app.add_option("--window", window, "frames kept besides the current one");
        app.add_option("--threshold", threshold, "difference binarization threshold");
        app.add_option("--blur-kernel", blur_kernel, "Gaussian kernel size (odd)");
        app.add_option("--blur-sigma", blur_sigma, "Gaussian sigma");
        app.add_option("--eta-threshold", eta_threshold, "trust level that triggers prediction");
        app.add_option("--area-fraction", area_fraction, "relative area change that rejects a frame");
        app.add_option("--links", links, "number of links in the observed arm");
        app.add_option("--fps", fps, "capture rate of the input video");
        app.add_option("--initial-angle", initial_angle, "starting command angle (rad)");
        app.add_option("--length-ratio", length_ratio, "pixels per metre");
        app.add_option("--angular-velocity-ratio", angular_velocity_ratio,
                       "optical over physical angular rate");
        app.add_option("--inertia", inertia, "moment of inertia for torque output");
        app.add_option("--joint-min", joint_min, "lower joint travel limit (rad)");
        app.add_option("--joint-max", joint_max, "upper joint travel limit (rad)");
        app.add_option("--max-speed", max_speed, "joint speed limit (rad/s)");
        app.add_option("--debug-dir", debug_dir, "dump per-frame layer masks here");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        std::string path = config_path;
        if (path.empty())
            if (const char* env = std::getenv("IMIMIC_CONFIG")) path = env;
        if (!path.empty()) cfg = parse_pipeline_config(path, cfg);

        if (window) cfg.window = *window;
        if (threshold) cfg.threshold = *threshold;
        if (blur_kernel) cfg.blur.kernel = *blur_kernel;
        if (blur_sigma) cfg.blur.sigma = *blur_sigma;
        if (eta_threshold) cfg.eta_threshold = *eta_threshold;
        if (area_fraction) cfg.area_change_fraction = *area_fraction;
        if (links) {
            if (*links < 1) throw Error(ErrorCode::ConfigParse, "--links must be positive");
            cfg.n_links = size_t(*links);
        }
        if (fps) {
            cfg.fps = *fps;
            cfg.calibration.fps = *fps;
        }
        if (initial_angle) cfg.initial_angle_rad = *initial_angle;
        if (length_ratio) cfg.calibration.length_ratio = *length_ratio;
        if (angular_velocity_ratio) cfg.calibration.angular_velocity_ratio = *angular_velocity_ratio;
        if (inertia) cfg.calibration.inertia = *inertia;
        if (joint_min) cfg.limits.min_rad = *joint_min;
        if (joint_max) cfg.limits.max_rad = *joint_max;
        if (max_speed) cfg.limits.max_speed_rad_s = *max_speed;
        if (!debug_dir.empty()) cfg.debug_dir = debug_dir;
        cfg.validate();
        return cfg;
    }
};

std::vector<std::pair<int, int>> parse_resolutions(const std::string& text) {
    std::vector<std::pair<int, int>> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        size_t x = item.find('x');
        if (x == std::string::npos)
            throw Error(ErrorCode::ConfigParse, "resolution must look like 240x320: " + item);
        try {
            int h = std::stoi(item.substr(0, x));
            int w = std::stoi(item.substr(x + 1));
            if (h < 8 || w < 8) throw std::invalid_argument("too small");
            out.emplace_back(h, w);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ConfigParse, "bad resolution: " + item);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw Error(ErrorCode::ConfigParse, "no resolutions given");
    return out;
}

int cmd_run(const std::string& source, const ConfigFlags& flags, const std::string& output) {
    PipelineConfig cfg = flags.resolve();
    auto frames = read_frame_sequence(source, cfg.fps, size_t(cfg.window) + 1);
    SequenceResult seq = run_sequence(frames, cfg);
    if (output.empty() || output == "-")
        write_trajectory_csv(std::cout, seq.log);
    else
        write_trajectory_csv(output, seq.log);
    std::fprintf(stderr, "%zu frames in, %zu ticks out\n", frames.size(), seq.ticks.size());
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              const std::string& y8_path, const std::string& truth_path) {
    SyntheticSpec spec = parse_synthetic_spec(spec_path);
    SyntheticScene scene = render_synthetic(spec);

    if (!y8_path.empty()) {
        std::vector<Plane> planes;
        planes.reserve(scene.frames.size());
        for (const auto& f : scene.frames) planes.push_back(f.plane);
        std::ofstream out(y8_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::DecodeFailure, y8_path + ": cannot open for writing");
        write_y8_stream(out, planes);
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        char name[32];
        for (const auto& f : scene.frames) {
            std::snprintf(name, sizeof name, "frame_%06ld.pgm", f.index);
            write_pgm((std::filesystem::path(out_dir) / name).string(), f.plane);
        }
    }
    if (!truth_path.empty()) write_ground_truth_csv(truth_path, scene.truth);
    std::fprintf(stderr, "rendered %zu frames (%dx%d)\n", scene.frames.size(), spec.height,
                 spec.width);
    return 0;
}

int cmd_simulate(const std::string& commands_path, const ConfigFlags& flags,
                 const std::string& output) {
    PipelineConfig cfg = flags.resolve();
    auto commands = read_command_csv(commands_path);
    TrajectoryLog log = simulate(commands, cfg.calibration, cfg.limits);
    if (output.empty() || output == "-")
        write_trajectory_csv(std::cout, log);
    else
        write_trajectory_csv(output, log);
    TrackingError err = tracking_error(log);
    std::fprintf(stderr, "mean |error| %.6g rad, max |error| %.6g rad, lag %ld ticks\n",
                 err.mean_abs_error, err.max_abs_error, err.lag_frames);
    return 0;
}

int cmd_bench(const ConfigFlags& flags, const std::string& resolutions, long frames) {
    PipelineConfig cfg = flags.resolve();
    auto sizes = parse_resolutions(resolutions);
    if (frames < cfg.window + 2)
        throw Error(ErrorCode::ConfigParse, "bench needs at least window + 2 frames");
    auto rows = benchmark(cfg, sizes, frames);
    std::printf("%10s %8s %10s %10s %10s\n", "resolution", "ticks", "mean_ms", "median_ms",
                "p95_ms");
    for (const auto& r : rows)
        std::printf("%4dx%-5d %8zu %10.3f %10.3f %10.3f\n", r.height, r.width, r.ticks,
                    r.mean_ms, r.median_ms, r.p95_ms);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optical motion mimicry pipeline"};
    app.require_subcommand(1);

    ConfigFlags run_flags, sim_flags, bench_flags;

    auto* run = app.add_subcommand("run", "process a frame sequence into joint commands");
    std::string run_source, run_output;
    run->add_option("source", run_source,
                    "frame directory, Y8 file, or - for Y8 on stdin")
        ->required();
    run->add_option("-o,--output", run_output, "trajectory CSV path (default stdout)");
    run_flags.add_to(*run);

    auto* synth = app.add_subcommand("synth", "render a synthetic scene from a spec file");
    std::string synth_spec, synth_dir, synth_y8, synth_truth;
    synth->add_option("spec", synth_spec, "scene description file")->required();
    synth->add_option("-d,--dir", synth_dir, "write frames as PGM files here");
    synth->add_option("--y8", synth_y8, "write frames as a single Y8 stream");
    synth->add_option("--truth", synth_truth, "write per-frame ground truth CSV");

    auto* sim = app.add_subcommand("simulate", "replay a command CSV through the servo model");
    std::string sim_commands, sim_output;
    sim->add_option("commands", sim_commands, "command CSV (tick, cmd_angle_rad, ...)")
        ->required();
    sim->add_option("-o,--output", sim_output, "trajectory CSV path (default stdout)");
    sim_flags.add_to(*sim);

    auto* bench = app.add_subcommand("bench", "per-tick latency across resolutions");
    std::string bench_res = "120x160,240x320,480x640,600x800";
    long bench_frames = 80;
    bench->add_option("--resolutions", bench_res, "HxW list, comma separated");
    bench->add_option("--frames", bench_frames, "frames rendered per resolution");
    bench_flags.add_to(*bench);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_source, run_flags, run_output);
        if (synth->parsed()) return cmd_synth(synth_spec, synth_dir, synth_y8, synth_truth);
        if (sim->parsed()) return cmd_simulate(sim_commands, sim_flags, sim_output);
        if (bench->parsed()) return cmd_bench(bench_flags, bench_res, bench_frames);
    } catch (const imimic::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
