#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "imimic/pipeline.hpp"

using namespace imimic;
namespace fs = std::filesystem;

namespace {

SyntheticSpec one_link_spec(long frames, double velocity, int noise = 0) {
    SyntheticSpec spec;
    spec.width = 160;
    spec.height = 120;
    spec.frames = frames;
    spec.noise_amplitude = noise;
    spec.pivot = {80.0, 60.0};
    LinkSpec link;
    link.length_px = 40;
    link.thickness_px = 8;
    link.angle0 = 0.4;
    link.velocity0 = velocity;
    spec.links.push_back(link);
    return spec;
}

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.window = 5;
    cfg.threshold = 12;
    return cfg;
}

// Same scalar-lane replay as the prediction suite: an independent check that
// the pipeline hands the recursion exactly what the trace says it did.
PredictionOutput oracle_predict(const std::vector<Vec2>& V_prev, const std::vector<Vec2>& A_prev,
                                const std::vector<Vec2>& V, const std::vector<Vec2>& A, int k) {
    const size_t L = V_prev.size();
    std::vector<double> vx, vy, ax, ay;
    for (const Vec2& v : V_prev) {
        vx.push_back(v.x);
        vy.push_back(v.y);
    }
    for (const Vec2& a : A_prev) {
        ax.push_back(a.x);
        ay.push_back(a.y);
    }
    size_t keep = L - size_t(k);
    if (keep > 0) {
        ax.push_back(V[0].x - V_prev.back().x);
        ay.push_back(V[0].y - V_prev.back().y);
        for (size_t i = 0; i < keep; ++i) {
            vx.push_back(V[i].x);
            vy.push_back(V[i].y);
        }
        for (size_t i = 0; i + 1 < keep; ++i) {
            ax.push_back(A[i].x);
            ay.push_back(A[i].y);
        }
    }
    while (vx.size() < 2 * L) {
        double alx = ax.back(), aly = ay.back();
        double a2x = ax.size() >= 2 ? alx - ax[ax.size() - 2] : 0.0;
        double a2y = ay.size() >= 2 ? aly - ay[ay.size() - 2] : 0.0;
        vx.push_back(vx.back() + alx);
        vy.push_back(vy.back() + aly);
        ax.push_back(alx + a2x);
        ay.push_back(aly + a2y);
    }
    PredictionOutput out;
    for (size_t i = vx.size() - L; i < vx.size(); ++i) out.V.push_back({vx[i], vy[i]});
    for (size_t i = ax.size() - (L - 1); i < ax.size(); ++i) out.A.push_back({ax[i], ay[i]});
    return out;
}

// CSV text with the elapsed_ms column (always last) removed from every line.
std::string strip_elapsed(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        auto comma = line.rfind(',');
        out += line.substr(0, comma);
        out += '\n';
    }
    return out;
}

std::string log_to_csv(const TrajectoryLog& log) {
    std::ostringstream out;
    write_trajectory_csv(out, log);
    return out.str();
}

}  // namespace

TEST_CASE("the first window-plus-one frames are warm-up") {
    SyntheticScene scene = render_synthetic(one_link_spec(10, 0.03));
    Pipeline pipeline(small_config());

    for (int i = 0; i < 6; ++i) CHECK(!pipeline.push(scene.frames[size_t(i)]).has_value());
    auto first = pipeline.push(scene.frames[6]);
    REQUIRE(first.has_value());
    CHECK(first->frame_index == 6);

    auto second = pipeline.push(scene.frames[7]);
    REQUIRE(second.has_value());
    CHECK(second->frame_index == 7);
}

TEST_CASE("run_sequence yields one tick per frame beyond the warm-up") {
    SyntheticScene scene = render_synthetic(one_link_spec(12, 0.03));
    SequenceResult seq = run_sequence(scene.frames, small_config());
    CHECK(seq.ticks.size() == 6);  // 12 - (5 + 1)
    CHECK(seq.log.rows.size() == seq.ticks.size());
    for (size_t i = 0; i < seq.ticks.size(); ++i) {
        CHECK(seq.ticks[i].frame_index == long(i) + 6);
        CHECK(seq.log.rows[i].tick == long(i));
    }

    // Too few frames to fill the window: silent empty result, not an error.
    std::vector<Frame> few(scene.frames.begin(), scene.frames.begin() + 4);
    SequenceResult empty = run_sequence(few, small_config());
    CHECK(empty.ticks.empty());
    CHECK(empty.log.rows.empty());
}

TEST_CASE("a static scene holds the initial angle without motion") {
    SyntheticScene scene = render_synthetic(one_link_spec(10, 0.0));
    PipelineConfig cfg = small_config();
    cfg.initial_angle_rad = 0.3;
    SequenceResult seq = run_sequence(scene.frames, cfg);
    REQUIRE(seq.ticks.size() == 4);

    for (const auto& tick : seq.ticks) {
        CHECK(tick.no_motion);
        CHECK(tick.omega_newest == 0.0);
        CHECK(tick.angle_estimate_rad == 0.3);
        CHECK(tick.command.targets == std::vector<double>{0.3});
        CHECK(!tick.estimate.predicted);
        CHECK(tick.estimate.eta == 0.0);
    }
    // The servo ramps from zero toward the held target.
    CHECK(seq.log.rows.front().error_rad > 0.0);
    CHECK(seq.log.rows.back().error_rad == 0.0);
}

TEST_CASE("a steadily rotating link yields measured, unpredicted ticks") {
    SyntheticScene scene = render_synthetic(one_link_spec(14, 0.03));
    SequenceResult seq = run_sequence(scene.frames, small_config());
    REQUIRE(!seq.ticks.empty());

    int measured = 0;
    for (const auto& tick : seq.ticks) {
        if (tick.no_motion) continue;
        ++measured;
        CHECK(!tick.estimate.predicted);
        CHECK(tick.estimate.eta > 0.5);
        CHECK(tick.omega_newest == doctest::Approx(0.03).epsilon(0.35));
    }
    CHECK(measured == int(seq.ticks.size()));
}

TEST_CASE("command angles integrate the newest angular velocity") {
    SyntheticScene scene = render_synthetic(one_link_spec(14, 0.03));
    PipelineConfig cfg = small_config();
    cfg.initial_angle_rad = 0.4;
    SequenceResult seq = run_sequence(scene.frames, cfg);

    double angle = 0.4;
    for (const auto& tick : seq.ticks) {
        if (!tick.no_motion) angle += tick.omega_newest;
        CHECK(tick.angle_estimate_rad == angle);
        CHECK(tick.command.targets[0] == angle);
    }
}

TEST_CASE("an occlusion gap flips ticks to predicted and the trace replays") {
    SyntheticSpec spec = one_link_spec(20, 0.03);
    OcclusionSpec occ;
    occ.first_frame = 10;
    occ.last_frame = 13;
    occ.x = 0;
    occ.y = 0;
    occ.w = 160;
    occ.h = 120;
    occ.fill = 20;  // matches the background: the arm simply vanishes
    spec.occlusions.push_back(occ);
    SyntheticScene scene = render_synthetic(spec);

    SequenceResult seq = run_sequence(scene.frames, small_config());
    REQUIRE(seq.ticks.size() == 14);

    int predicted = 0, replayed = 0, full_gap = 0;
    for (const auto& tick : seq.ticks) {
        if (tick.no_motion) continue;
        if (!tick.estimate.predicted) {
            CHECK(!tick.trace.has_value());
            continue;
        }
        ++predicted;
        REQUIRE(tick.trace.has_value());
        const PredictionTrace& tr = *tick.trace;
        CHECK(tr.k >= 0);
        if (tr.k == 4) ++full_gap;  // whole velocity window extrapolated

        PredictionOutput want =
            oracle_predict(tr.V_prev, tr.A_prev, tr.V_in, tr.A_in, tr.k);
        REQUIRE(tr.V_out.size() == want.V.size());
        REQUIRE(tr.A_out.size() == want.A.size());
        bool same = true;
        for (size_t i = 0; i < want.V.size(); ++i)
            same = same && tr.V_out[i] == want.V[i];
        for (size_t i = 0; i < want.A.size(); ++i)
            same = same && tr.A_out[i] == want.A[i];
        CHECK(same);
        if (same) ++replayed;

        // The tick's own estimate carries the extrapolated series.
        CHECK(tick.estimate.V == tr.V_out);
        CHECK(tick.estimate.A == tr.A_out);
    }
    CHECK(predicted >= 3);  // the gap spans four frames
    CHECK(full_gap >= 2);   // the mid-gap ticks see nothing measurable
    CHECK(replayed == predicted);

    // Ticks before the gap saw the clean scene and measured normally.
    CHECK(!seq.ticks.front().estimate.predicted);
    CHECK(!seq.ticks.front().no_motion);
}

TEST_CASE("two runs over the same frames log identical trajectories") {
    SyntheticScene scene = render_synthetic(one_link_spec(16, 0.03, 5));
    PipelineConfig cfg = small_config();
    SequenceResult a = run_sequence(scene.frames, cfg);
    SequenceResult b = run_sequence(scene.frames, cfg);
    CHECK(strip_elapsed(log_to_csv(a.log)) == strip_elapsed(log_to_csv(b.log)));
    CHECK(!a.log.rows.empty());
}

TEST_CASE("three-link runs report chain angles near the rendered truth") {
    SyntheticSpec spec;
    spec.width = 480;
    spec.height = 360;
    spec.frames = 12;
    spec.pivot = {120.0, 180.0};
    // Every joint gets its own rate so the whole arm shows up in the
    // difference masks; a link whose pixels never move is invisible to a
    // motion-based observer. Links stay thinner than the blur support so the
    // leading and trailing edge bands fuse into one stripe instead of a
    // tip-joined horseshoe whose skeleton doubles back.
    double rel[3] = {0.3, -0.5, 0.8};
    double vel[3] = {0.025, 0.02, 0.02};
    int len[3] = {70, 60, 50};
    for (int i = 0; i < 3; ++i) {
        LinkSpec link;
        link.length_px = len[i];
        link.thickness_px = 5;
        link.angle0 = rel[i];
        link.velocity0 = vel[i];
        spec.links.push_back(link);
    }
    SyntheticScene scene = render_synthetic(spec);

    PipelineConfig cfg = small_config();
    cfg.n_links = 3;
    SequenceResult seq = run_sequence(scene.frames, cfg);
    REQUIRE(!seq.ticks.empty());

    int with_chain = 0;
    for (size_t i = 0; i < seq.ticks.size(); ++i) {
        const auto& tick = seq.ticks[i];
        if (!tick.chain) continue;
        ++with_chain;
        REQUIRE(tick.chain->joints.size() == 3);
        const auto& truth = scene.truth.angle[size_t(tick.frame_index)];
        for (size_t j = 0; j < 3; ++j)
            CHECK(std::abs(tick.chain->joints[j] - truth[j]) < 0.1);
        CHECK(tick.command.targets == tick.chain->joints);
        CHECK(seq.log.rows[i].chain_angles == tick.chain->joints);
    }
    CHECK(with_chain * 10 >= int(seq.ticks.size()) * 7);
}

TEST_CASE("debug directory receives per-tick layer dumps") {
    auto dir = fs::temp_directory_path() / "imimic_dbg_test";
    fs::remove_all(dir);

    SyntheticScene scene = render_synthetic(one_link_spec(7, 0.03));
    PipelineConfig cfg = small_config();
    cfg.debug_dir = dir.string();
    run_sequence(scene.frames, cfg);

    int delta1 = 0, delta2 = 0, object = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto name = entry.path().filename().string();
        if (name.find("_delta1_") != std::string::npos) ++delta1;
        if (name.find("_delta2_") != std::string::npos) ++delta2;
        if (name.find("_object_") != std::string::npos) ++object;
    }
    CHECK(delta1 == 5);  // one per lag
    CHECK(delta2 == 5);
    CHECK(object >= 1);
    fs::remove_all(dir);
}

TEST_CASE("config validation rejects out-of-range settings") {
    auto bad = [](auto&& mutate) {
        PipelineConfig cfg;
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), Error);
    };
    bad([](PipelineConfig& c) { c.window = 2; });
    bad([](PipelineConfig& c) { c.threshold = 256; });
    bad([](PipelineConfig& c) { c.threshold = -1; });
    bad([](PipelineConfig& c) { c.eta_threshold = 1.5; });
    bad([](PipelineConfig& c) { c.area_change_fraction = 0.0; });
    bad([](PipelineConfig& c) { c.area_change_fraction = 1.0; });
    bad([](PipelineConfig& c) { c.n_links = 0; });
    bad([](PipelineConfig& c) { c.fps = 0.0; });
    bad([](PipelineConfig& c) { c.blur.kernel = 4; });
    bad([](PipelineConfig& c) { c.calibration.inertia = 0.0; });
    bad([](PipelineConfig& c) { c.limits.max_speed_rad_s = -1.0; });

    PipelineConfig ok;
    ok.validate();
}

TEST_CASE("config files override only the keys they name") {
    auto path = (fs::temp_directory_path() / "imimic_pipeline.cfg").string();
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "window = 7\n";
        out << "threshold = 18   # trailing comment\n";
        out << "\n";
        out << "links = 2\n";
        out << "fps = 25\n";
        out << "joint_max = 0.9\n";
        out << "angular_velocity_ratio = 2.0\n";
        out << "debug_dir = /tmp/somewhere\n";
    }
    PipelineConfig base;
    base.eta_threshold = 0.4;
    PipelineConfig cfg = parse_pipeline_config(path, base);
    CHECK(cfg.window == 7);
    CHECK(cfg.threshold == 18);
    CHECK(cfg.n_links == 2);
    CHECK(cfg.fps == 25.0);
    CHECK(cfg.calibration.fps == 25.0);  // fps feeds the unit mapping too
    CHECK(cfg.limits.max_rad == 0.9);
    CHECK(*cfg.calibration.angular_velocity_ratio == 2.0);
    CHECK(cfg.debug_dir == "/tmp/somewhere");
    CHECK(cfg.eta_threshold == 0.4);          // from the base
    CHECK(cfg.blur.kernel == 15);             // untouched default
    fs::remove(path);
}

TEST_CASE("config file errors carry the offending line number") {
    auto write = [](const char* name, const std::string& text) {
        auto p = (fs::temp_directory_path() / name).string();
        std::ofstream out(p);
        out << text;
        return p;
    };

    auto unknown = write("imimic_cfg_unknown.cfg", "window = 5\nwat = 1\n");
    try {
        parse_pipeline_config(unknown);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigParse);
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
    }

    auto noeq = write("imimic_cfg_noeq.cfg", "window 5\n");
    CHECK_THROWS_AS(parse_pipeline_config(noeq), Error);

    auto badnum = write("imimic_cfg_badnum.cfg", "threshold = soon\n");
    try {
        parse_pipeline_config(badnum);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }

    auto frac = write("imimic_cfg_frac.cfg", "window = 5.5\n");
    CHECK_THROWS_AS(parse_pipeline_config(frac), Error);

    // Out-of-range values pass parsing and fail validation.
    auto range = write("imimic_cfg_range.cfg", "window = 2\n");
    CHECK_THROWS_AS(parse_pipeline_config(range), Error);

    CHECK_THROWS_AS(parse_pipeline_config((fs::temp_directory_path() / "nope.cfg").string()),
                    Error);

    for (const char* n : {"imimic_cfg_unknown.cfg", "imimic_cfg_noeq.cfg",
                          "imimic_cfg_badnum.cfg", "imimic_cfg_frac.cfg",
                          "imimic_cfg_range.cfg"})
        fs::remove(fs::temp_directory_path() / n);
}

TEST_CASE("benchmark reports one row per resolution") {
    PipelineConfig cfg = small_config();
    auto rows = benchmark(cfg, {{120, 160}, {180, 240}}, 12);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].height == 120);
    CHECK(rows[0].width == 160);
    CHECK(rows[1].height == 180);
    for (const auto& row : rows) {
        CHECK(row.ticks == 6);  // 12 frames, window 5
        CHECK(row.mean_ms > 0.0);
        CHECK(row.median_ms > 0.0);
        CHECK(row.p95_ms >= row.median_ms);
    }
}

TEST_CASE("per-tick latency does not grow over a long run") {
    SyntheticScene scene = render_synthetic(one_link_spec(560, 0.01, 3));
    SequenceResult seq = run_sequence(scene.frames, small_config());
    REQUIRE(seq.ticks.size() == 554);

    auto window_median = [&](size_t b, size_t e) {
        std::vector<double> v;
        for (size_t i = b; i < e; ++i) v.push_back(seq.ticks[i].elapsed_ms);
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    double early = window_median(10, 60);
    double late = window_median(504, 554);
    CHECK(late <= 3.0 * early + 0.2);  // no drift; slack absorbs scheduler noise
}
