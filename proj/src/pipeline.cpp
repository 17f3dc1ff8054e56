#include "imimic/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "imimic/image_io.hpp"

namespace imimic {

namespace {

PipelineConfig checked(PipelineConfig c) {
    c.validate();
    return c;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void dump_layer(const std::string& dir, long frame, const char* layer, int p,
                const BinaryMask& mask) {
    char name[96];
    std::snprintf(name, sizeof(name), "%06ld_%s_%d.pgm", frame, layer, p);
    write_pgm((std::filesystem::path(dir) / name).string(), mask.plane());
}

}  // namespace

void PipelineConfig::validate() const {
    if (window < 3)
        throw Error(ErrorCode::ConfigParse, "window must be at least 3 frames");
    if (threshold < 0 || threshold > 255)
        throw Error(ErrorCode::ConfigParse, "binarize threshold must be in [0, 255]");
    if (!(eta_threshold >= 0.0 && eta_threshold <= 1.0))
        throw Error(ErrorCode::ConfigParse, "eta threshold must be in [0, 1]");
    if (!(area_change_fraction > 0.0 && area_change_fraction < 1.0))
        throw Error(ErrorCode::ConfigParse, "area change fraction must be in (0, 1)");
    if (n_links < 1)
        throw Error(ErrorCode::ConfigParse, "need at least one link");
    if (!(fps > 0.0))
        throw Error(ErrorCode::ConfigParse, "fps must be positive");
    if (!blur.valid())
        throw Error(ErrorCode::ConfigParse, "blur kernel must be odd and sigma positive");
    if (!(calibration.fps > 0.0))
        throw Error(ErrorCode::ConfigParse, "calibration fps must be positive");
    if (!(calibration.inertia > 0.0))
        throw Error(ErrorCode::NonPositiveInertia, "inertia must be positive");
    limits.validate();
}

Pipeline::Pipeline(PipelineConfig config)
    : config_(checked(std::move(config))),
      window_(config_.window, config_.blur),
      servo_(config_.n_links, config_.limits, config_.fps),
      log_{config_.n_links, {}} {
    joint_angles_.assign(config_.n_links, 0.0);
    joint_angles_[0] = config_.initial_angle_rad;
    if (!config_.debug_dir.empty())
        std::filesystem::create_directories(config_.debug_dir);
}

std::optional<TickResult> Pipeline::push(Frame frame) {
    window_.push(std::move(frame));
    ++frames_seen_;
    // The first N+1 frames only fill the window; output starts on frame N+2.
    if (frames_seen_ <= size_t(config_.window) + 1) return std::nullopt;
    return tick();
}

TickResult Pipeline::tick() {
    const auto t0 = std::chrono::steady_clock::now();
    const size_t n = size_t(config_.window);   // observations per tick
    const size_t L = n - 1;                    // velocity entries per tick

    TickResult result;
    result.frame_index = window_.frame(0).index;

    if (!config_.debug_dir.empty()) {
        auto d1 = delta1(window_, config_.threshold);
        auto d2 = delta2(window_, config_.threshold);
        for (size_t p = 0; p < d1.size(); ++p)
            dump_layer(config_.debug_dir, result.frame_index, "delta1", int(p), d1[p]);
        for (size_t i = 0; i < d2.size(); ++i)
            dump_layer(config_.debug_dir, result.frame_index, "delta2", int(i) + 1, d2[i]);
    }

    std::vector<ObjectObservation> obs;
    bool have_obs = true;
    try {
        obs = observe(window_, ObserveParams{config_.threshold, {}});
    } catch (const Error& e) {
        if (e.code() != ErrorCode::AllFramesEmpty) throw;
        have_obs = false;
    }

    if (have_obs && !config_.debug_dir.empty()) {
        for (size_t j = 0; j < obs.size(); ++j)
            if (obs[j].valid)
                dump_layer(config_.debug_dir, result.frame_index, "object", int(j), obs[j].mask);
    }

    double eta = 0.0;
    RegionTrack track;
    if (have_obs) {
        track = region_track(obs);
        eta = trust_factor(track);
    }

    std::optional<MotionEstimate> measured;
    if (have_obs) {
        try {
            MotionEstimate m = estimate_motion(obs);
            angular_kinematics(obs, m);
            measured = std::move(m);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientObservations &&
                e.code() != ErrorCode::ZeroRadius)
                throw;
        }
    }

    MotionEstimate est;
    bool have_estimate = false;

    if (have_obs && should_predict(eta, config_.eta_threshold) && prediction_.initialized()) {
        ReliabilityResult rel = filter_reliable(track, config_.area_change_fraction);
        size_t k = std::min(size_t(rel.k), L);
        std::vector<Vec2> V_in(L), A_in(L - 1);
        if (measured && measured->V.size() == L) {
            V_in = measured->V;
            A_in = measured->A;
        } else {
            k = L;  // nothing measurable this tick: extrapolate history alone
        }

        PredictionTrace trace;
        trace.V_prev = prediction_.V_prev;
        trace.A_prev = prediction_.A_prev;
        trace.V_in = V_in;
        trace.A_in = A_in;
        trace.k = int(k);
        PredictionOutput out = predict(prediction_, V_in, A_in, int(k));
        trace.V_out = out.V;
        trace.A_out = out.A;
        result.trace = std::move(trace);

        if (measured) est = *measured;
        est.V = out.V;
        est.A = out.A;
        est.V_valid.assign(est.V.size(), true);
        est.A_valid.assign(est.A.size(), true);
        if (est.omega.size() != L) est.omega.assign(L, 0.0);
        if (est.alpha.size() != L - 1) est.alpha.assign(L - 1, 0.0);
        if (est.r_px <= 0.0) {
            std::vector<double> lengths;
            for (const auto& o : obs)
                if (o.valid) lengths.push_back(o.skeleton.length_px);
            est.r_px = median(lengths);
        }

        if (k > 0) {
            // Resume positions from the newest observation that survived
            // filtering and walk the extrapolated tail velocities forward;
            // bearings about that observation's pivot give the angular tail.
            size_t cut = n - 1 - std::min(size_t(rel.k), n - 1);
            size_t seed = obs.size();
            for (size_t j = cut + 1; j-- > 0;)
                if (obs[j].valid) { seed = j; break; }
            if (seed == obs.size())
                for (size_t j = obs.size(); j-- > 0;)
                    if (obs[j].valid) { seed = j; break; }
            if (seed != obs.size()) {
                std::vector<Vec2> positions{obs[seed].location()};
                for (size_t i = L - k; i < L; ++i)
                    positions.push_back(positions.back() + est.V[i]);
                auto phi = bearing_series(positions, obs[seed].pivot_px.to_vec());
                for (size_t i = 0; i + 1 < phi.size(); ++i)
                    est.omega[L - k + i] = wrap_angle(phi[i + 1] - phi[i]);
                size_t first = L - k == 0 ? 0 : L - k - 1;
                for (size_t i = first; i + 1 < L; ++i)
                    est.alpha[i] = est.omega[i + 1] - est.omega[i];
            }
        }
        est.predicted = true;
        have_estimate = true;
    } else if (measured) {
        est = *measured;
        have_estimate = true;
    }

    est.eta = eta;
    result.no_motion = !have_estimate;

    if (have_estimate) {
        commit(prediction_, est.V, est.A);
        result.omega_newest = est.omega.empty() ? 0.0 : est.omega.back();
        result.alpha_newest = est.alpha.empty() ? 0.0 : est.alpha.back();
    }

    if (config_.n_links > 1 && have_obs) {
        for (size_t j = obs.size(); j-- > 0;) {
            if (!obs[j].valid) continue;
            auto seg = segment_and_fit(obs[j].skeleton.path, config_.n_links,
                                       config_.segmentation);
            if (seg.models.size() == config_.n_links && !seg.under_segmented)
                result.chain = chain_angles(seg.models, Vec2{1.0, 0.0});
            break;
        }
    }

    // Commanded targets: multi-link runs mirror the measured joint angles
    // directly; the single-link run integrates angular velocity so occlusion
    // gaps coast on the predicted rate.
    if (config_.n_links > 1) {
        if (result.chain) joint_angles_ = result.chain->joints;
    } else if (have_estimate) {
        joint_angles_[0] += result.omega_newest;
    }

    result.angle_estimate_rad = joint_angles_[0];
    result.command.tick = long(log_.rows.size());
    result.command.targets = joint_angles_;
    const auto& exec = servo_.step(result.command.targets);

    result.estimate = std::move(est);

    TrajectoryRow row;
    row.tick = result.command.tick;
    row.eta = eta;
    row.predicted = result.estimate.predicted;
    row.omega_px = result.omega_newest;
    row.omega_phys = map_to_physical(config_.calibration, result.omega_newest,
                                     Quantity::AngularVelocity);
    row.alpha_phys = map_to_physical(config_.calibration, result.alpha_newest,
                                     Quantity::AngularAcceleration);
    row.torque = config_.calibration.inertia * row.alpha_phys;
    row.cmd_angles = result.command.targets;
    if (result.chain) row.chain_angles = result.chain->joints;
    row.exec_angles = exec;
    row.error_rad = row.cmd_angles[0] - exec[0];
    row.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    result.elapsed_ms = row.elapsed_ms;
    log_.rows.push_back(std::move(row));
    return result;
}

SequenceResult run_sequence(const std::vector<Frame>& frames, const PipelineConfig& config) {
    Pipeline pipeline(config);
    SequenceResult out;
    for (const Frame& f : frames)
        if (auto r = pipeline.push(f)) out.ticks.push_back(std::move(*r));
    out.log = pipeline.take_log();
    return out;
}

std::vector<BenchRow> benchmark(const PipelineConfig& config,
                                const std::vector<std::pair<int, int>>& resolutions,
                                long frames_per_resolution) {
    std::vector<BenchRow> rows;
    for (auto [h, w] : resolutions) {
        double m = std::min(w, h);
        SyntheticSpec spec;
        spec.width = w;
        spec.height = h;
        spec.frames = frames_per_resolution;
        spec.fps = config.fps;
        spec.seed = 42;
        spec.noise_amplitude = 5;
        spec.pivot = {w / 2.0, h / 2.0};
        LinkSpec link;
        link.length_px = 0.35 * m;
        link.thickness_px = std::max(6.0, 0.06 * m);
        link.velocity0 = 0.03;
        link.texture_amp = 40.0;
        link.texture_scale = std::max(3.0, 0.02 * m);
        spec.links.push_back(link);

        SyntheticScene scene = render_synthetic(spec);
        PipelineConfig cfg = config;
        cfg.debug_dir.clear();
        SequenceResult seq = run_sequence(scene.frames, cfg);

        BenchRow row;
        row.height = h;
        row.width = w;
        row.ticks = seq.ticks.size();
        std::vector<double> t;
        t.reserve(seq.ticks.size());
        for (const auto& tick : seq.ticks) t.push_back(tick.elapsed_ms);
        if (!t.empty()) {
            double sum = 0.0;
            for (double x : t) sum += x;
            row.mean_ms = sum / double(t.size());
            row.median_ms = median(t);
            std::sort(t.begin(), t.end());
            row.p95_ms = t[std::min(t.size() - 1, size_t(std::ceil(0.95 * double(t.size())) - 1))];
        }
        rows.push_back(row);
    }
    return rows;
}

PipelineConfig parse_pipeline_config(const std::string& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ConfigParse, "cannot open config file: " + path);

    auto fail = [&](int line, const std::string& msg) -> void {
        throw Error(ErrorCode::ConfigParse,
                    path + ":" + std::to_string(line) + ": " + msg);
    };

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw.substr(0, raw.find('#'));
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail(lineno, "expected key = value");

        auto as_double = [&](const std::string& v) {
            try {
                size_t used = 0;
                double d = std::stod(v, &used);
                if (used != v.size()) fail(lineno, "bad number: " + v);
                return d;
            } catch (const std::logic_error&) {
                fail(lineno, "bad number: " + v);
                return 0.0;  // unreachable
            }
        };
        auto as_int = [&](const std::string& v) {
            double d = as_double(v);
            if (d != std::floor(d)) fail(lineno, "expected an integer: " + v);
            return int(d);
        };

        if (key == "window") base.window = as_int(value);
        else if (key == "blur_kernel") base.blur.kernel = as_int(value);
        else if (key == "blur_sigma") base.blur.sigma = as_double(value);
        else if (key == "threshold") base.threshold = as_int(value);
        else if (key == "eta_threshold") base.eta_threshold = as_double(value);
        else if (key == "area_change_fraction") base.area_change_fraction = as_double(value);
        else if (key == "links") {
            int v = as_int(value);
            if (v < 1) fail(lineno, "links must be positive");
            base.n_links = size_t(v);
        } else if (key == "fps") {
            base.fps = as_double(value);
            base.calibration.fps = base.fps;
        } else if (key == "initial_angle") base.initial_angle_rad = as_double(value);
        else if (key == "length_ratio") base.calibration.length_ratio = as_double(value);
        else if (key == "angular_velocity_ratio")
            base.calibration.angular_velocity_ratio = as_double(value);
        else if (key == "inertia") base.calibration.inertia = as_double(value);
        else if (key == "joint_min") base.limits.min_rad = as_double(value);
        else if (key == "joint_max") base.limits.max_rad = as_double(value);
        else if (key == "max_speed") base.limits.max_speed_rad_s = as_double(value);
        else if (key == "split_residual") base.segmentation.split_residual_px = as_double(value);
        else if (key == "min_segment") {
            int v = as_int(value);
            if (v < 1) fail(lineno, "min_segment must be positive");
            base.segmentation.min_segment_px = size_t(v);
        } else if (key == "debug_dir") base.debug_dir = value;
        else fail(lineno, "unknown key: " + key);
    }
    base.validate();
    return base;
}

}  // namespace imimic
