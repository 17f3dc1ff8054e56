#include "imimic/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "imimic/rng.hpp"

namespace imimic {

namespace {

int default_intensity(size_t link_index) {
    // Distinct, high-contrast fills against dark backgrounds.
    static const int table[] = {230, 200, 170, 245, 185, 215, 155, 140};
    return table[link_index % 8];
}

double accel_at(const LinkSpec& link, long k) {
    // k-th transition (1-based). Past the last segment the program coasts.
    long remaining = k;
    for (const auto& seg : link.segments) {
        if (remaining <= seg.frames) return seg.accel;
        remaining -= seg.frames;
    }
    return 0.0;
}

struct LinkFramePose {
    Vec2 base;
    Vec2 dir;     // unit, along the link
    Vec2 normal;  // unit, perpendicular
    double length;
    double half_thickness;
};

// Poses for all links at one frame given per-link absolute angles.
std::vector<LinkFramePose> chain_poses(const SyntheticSpec& spec,
                                       const std::vector<double>& joint_angles) {
    std::vector<LinkFramePose> poses;
    Vec2 base = spec.pivot;
    double abs_angle = 0.0;
    for (size_t i = 0; i < spec.links.size(); ++i) {
        abs_angle += joint_angles[i];
        Vec2 d{std::cos(abs_angle), std::sin(abs_angle)};
        Vec2 n{-d.y, d.x};
        poses.push_back({base, d, n, spec.links[i].length_px,
                         spec.links[i].thickness_px * 0.5});
        base = base + d * spec.links[i].length_px;
    }
    return poses;
}

void check_in_frame(const SyntheticSpec& spec, const LinkFramePose& pose, size_t link,
                    long frame) {
    Vec2 tip = pose.base + pose.dir * pose.length;
    Vec2 corners[4] = {
        pose.base + pose.normal * pose.half_thickness,
        pose.base - pose.normal * pose.half_thickness,
        tip + pose.normal * pose.half_thickness,
        tip - pose.normal * pose.half_thickness,
    };
    for (const Vec2& c : corners) {
        if (c.x < 0.0 || c.y < 0.0 || c.x > spec.width || c.y > spec.height)
            throw Error(ErrorCode::LinkOutOfFrame,
                        "link " + std::to_string(link) + " leaves the frame at frame " +
                            std::to_string(frame));
    }
}

int texture_offset(const SyntheticSpec& spec, size_t link_index, const LinkSpec& link,
                   double u, double w) {
    if (link.texture_amp <= 0.0) return 0;
    double scale = link.texture_scale > 0.5 ? link.texture_scale : 8.0;
    long bu = long(std::floor(u / scale));
    long bw = long(std::floor((w + link.thickness_px) / scale));
    uint64_t h = hash_mix(hash_mix(spec.seed ^ 0xD1CEB00CULL, uint64_t(link_index) + 1),
                          (uint64_t(uint32_t(bu)) << 32) | uint64_t(uint32_t(bw)));
    int span = int(link.texture_amp) * 2 + 1;
    return int(h % uint64_t(span)) - int(link.texture_amp);
}

// Paints one link; also records its own pixel set when wanted.
void raster_link(const SyntheticSpec& spec, size_t link_index, const LinkFramePose& pose,
                 Plane* canvas, BinaryMask* own_mask) {
    const LinkSpec& link = spec.links[link_index];
    Vec2 tip = pose.base + pose.dir * pose.length;
    double margin = pose.half_thickness + 1.0;
    int x0 = std::max(0, int(std::floor(std::min(pose.base.x, tip.x) - margin)));
    int x1 = std::min(spec.width - 1, int(std::ceil(std::max(pose.base.x, tip.x) + margin)));
    int y0 = std::max(0, int(std::floor(std::min(pose.base.y, tip.y) - margin)));
    int y1 = std::min(spec.height - 1, int(std::ceil(std::max(pose.base.y, tip.y) + margin)));

    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            Vec2 q{x + 0.5, y + 0.5};
            Vec2 rel = q - pose.base;
            double u = rel.dot(pose.dir);
            if (u < 0.0 || u > pose.length) continue;
            double w = rel.dot(pose.normal);
            if (w < -pose.half_thickness || w > pose.half_thickness) continue;
            if (canvas) {
                int v = link.intensity + texture_offset(spec, link_index, link, u, w);
                canvas->at(x, y) = uint8_t(std::clamp(v, 0, 255));
            }
            if (own_mask) own_mask->set(x, y);
        }
    }
}

}  // namespace

void SyntheticSpec::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigParse, msg); };
    if (width < 8 || height < 8) fail("scene must be at least 8x8");
    if (frames < 1) fail("frames must be >= 1");
    if (fps <= 0.0) fail("fps must be positive");
    if (background < 0 || background > 255) fail("background outside [0,255]");
    if (noise_amplitude < 0 || noise_amplitude > 255) fail("noise_amplitude outside [0,255]");
    if (links.empty()) fail("at least one [link] required");
    if (pivot.x < 0 || pivot.y < 0 || pivot.x > width || pivot.y > height)
        fail("pivot outside the frame");
    for (size_t i = 0; i < links.size(); ++i) {
        if (links[i].length_px <= 0.0) fail("link " + std::to_string(i) + ": length must be > 0");
        if (links[i].thickness_px <= 0.0)
            fail("link " + std::to_string(i) + ": thickness must be > 0");
        if (links[i].intensity != -1 && (links[i].intensity < 0 || links[i].intensity > 255))
            fail("link " + std::to_string(i) + ": intensity outside [0,255]");
    }
    for (size_t i = 0; i < occlusions.size(); ++i) {
        const auto& o = occlusions[i];
        if (o.w <= 0 || o.h <= 0 || o.x < 0 || o.y < 0 || o.x + o.w > width ||
            o.y + o.h > height)
            fail("occlusion " + std::to_string(i) + ": rectangle outside frame bounds");
        if (o.first_frame < 0 || o.last_frame < o.first_frame)
            fail("occlusion " + std::to_string(i) + ": bad frame range");
        if (o.fill < 0 || o.fill > 255)
            fail("occlusion " + std::to_string(i) + ": fill outside [0,255]");
    }
}

GroundTruth evaluate_programs(const SyntheticSpec& spec) {
    GroundTruth gt;
    gt.frames = spec.frames;
    gt.n_links = spec.links.size();
    gt.angle.assign(size_t(spec.frames), std::vector<double>(gt.n_links, 0.0));
    gt.velocity = gt.angle;
    gt.accel = gt.angle;
    gt.occluded_fraction = gt.angle;

    for (size_t i = 0; i < spec.links.size(); ++i) {
        const LinkSpec& link = spec.links[i];
        double angle = link.angle0;
        double vel = link.velocity0;
        gt.angle[0][i] = angle;
        gt.velocity[0][i] = vel;
        gt.accel[0][i] = 0.0;
        for (long k = 1; k < spec.frames; ++k) {
            double a = accel_at(link, k);
            vel += a;
            angle += vel;
            gt.angle[size_t(k)][i] = angle;
            gt.velocity[size_t(k)][i] = vel;
            gt.accel[size_t(k)][i] = a;
        }
    }
    return gt;
}

SyntheticScene render_synthetic(const SyntheticSpec& spec) {
    SyntheticSpec s = spec;
    s.validate();
    for (size_t i = 0; i < s.links.size(); ++i)
        if (s.links[i].intensity == -1) s.links[i].intensity = default_intensity(i);

    SyntheticScene scene;
    scene.truth = evaluate_programs(s);

    scene.frames.reserve(size_t(s.frames));
    for (long k = 0; k < s.frames; ++k) {
        auto poses = chain_poses(s, scene.truth.angle[size_t(k)]);
        for (size_t i = 0; i < poses.size(); ++i) check_in_frame(s, poses[i], i, k);

        Plane canvas(s.width, s.height, uint8_t(s.background));
        std::vector<BinaryMask> own(s.links.size());
        for (size_t i = 0; i < poses.size(); ++i) {
            own[i] = BinaryMask(s.width, s.height);
            raster_link(s, i, poses[i], &canvas, &own[i]);
        }

        // Occluders paint over everything below them.
        for (const auto& occ : s.occlusions) {
            if (k < occ.first_frame || k > occ.last_frame) continue;
            for (int y = occ.y; y < occ.y + occ.h; ++y)
                for (int x = occ.x; x < occ.x + occ.w; ++x)
                    canvas.at(x, y) = uint8_t(occ.fill);
        }

        // Fraction of each link's own pixels hidden by active occluders.
        for (size_t i = 0; i < own.size(); ++i) {
            size_t total = 0, hidden = 0;
            for (int y = 0; y < s.height; ++y) {
                for (int x = 0; x < s.width; ++x) {
                    if (!own[i].test(x, y)) continue;
                    ++total;
                    for (const auto& occ : s.occlusions) {
                        if (k < occ.first_frame || k > occ.last_frame) continue;
                        if (x >= occ.x && x < occ.x + occ.w && y >= occ.y &&
                            y < occ.y + occ.h) {
                            ++hidden;
                            break;
                        }
                    }
                }
            }
            scene.truth.occluded_fraction[size_t(k)][i] =
                total ? double(hidden) / double(total) : 0.0;
        }

        if (s.noise_amplitude > 0) {
            // Frame-indexed seeding keeps frames independently addressable.
            SplitMix64 rng(hash_mix(s.seed, uint64_t(k) + 0x5EEDULL));
            for (auto& px : canvas.pixels()) {
                int v = int(px) + rng.next_in(-s.noise_amplitude, s.noise_amplitude);
                px = uint8_t(std::clamp(v, 0, 255));
            }
        }

        scene.frames.push_back(make_frame(std::move(canvas), k, s.fps));
    }
    return scene;
}

FrameMasks render_frame_masks(const SyntheticSpec& spec, long frame_index) {
    SyntheticSpec s = spec;
    s.validate();
    if (frame_index < 0 || frame_index >= s.frames)
        throw Error(ErrorCode::ConfigParse,
                    "frame index " + std::to_string(frame_index) + " outside program");
    GroundTruth gt = evaluate_programs(s);
    auto poses = chain_poses(s, gt.angle[size_t(frame_index)]);
    for (size_t i = 0; i < poses.size(); ++i) check_in_frame(s, poses[i], i, frame_index);

    FrameMasks out;
    out.combined = BinaryMask(s.width, s.height);
    for (size_t i = 0; i < poses.size(); ++i) {
        BinaryMask m(s.width, s.height);
        raster_link(s, i, poses[i], nullptr, &m);
        out.combined |= m;
        out.links.push_back(std::move(m));
    }
    return out;
}

namespace {

struct SpecParser {
    std::string origin;
    long line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::ConfigParse,
                    origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    double num(const std::string& tok, const char* what) const {
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail(std::string("bad ") + what + " '" + tok + "'");
        }
    }

    std::vector<std::string> split(const std::string& s) const {
        std::vector<std::string> out;
        std::istringstream ss(s);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    }
};

}  // namespace

SyntheticSpec parse_synthetic_spec_text(const std::string& text, const std::string& origin) {
    SyntheticSpec spec;
    SpecParser p{origin};

    enum class Section { Scene, Link, Occlusion } section = Section::Scene;
    std::istringstream in(text);
    std::string raw;
    bool pivot_seen = false;

    while (std::getline(in, raw)) {
        ++p.line_no;
        std::string line = raw.substr(0, raw.find('#'));
        // trim
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);

        if (line == "[link]") {
            section = Section::Link;
            spec.links.emplace_back();
            continue;
        }
        if (line == "[occlusion]") {
            section = Section::Occlusion;
            spec.occlusions.emplace_back();
            continue;
        }
        if (line.front() == '[') p.fail("unknown section " + line);

        auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected key = value");
        std::string key = line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1);
        std::string value = line.substr(eq + 1);
        auto vb = value.find_first_not_of(" \t");
        if (vb == std::string::npos) p.fail("missing value for " + key);
        value = value.substr(vb);
        auto toks = p.split(value);

        auto one = [&]() -> double {
            if (toks.size() != 1) p.fail(key + " expects one value");
            return p.num(toks[0], key.c_str());
        };

        switch (section) {
            case Section::Scene: {
                if (key == "width") spec.width = int(one());
                else if (key == "height") spec.height = int(one());
                else if (key == "frames") spec.frames = long(one());
                else if (key == "fps") spec.fps = one();
                else if (key == "seed") spec.seed = uint64_t(one());
                else if (key == "background") spec.background = int(one());
                else if (key == "noise_amplitude") spec.noise_amplitude = int(one());
                else if (key == "pivot") {
                    if (toks.size() != 2) p.fail("pivot expects 'x y'");
                    spec.pivot = {p.num(toks[0], "pivot x"), p.num(toks[1], "pivot y")};
                    pivot_seen = true;
                } else p.fail("unknown scene key " + key);
                break;
            }
            case Section::Link: {
                LinkSpec& link = spec.links.back();
                if (key == "length") link.length_px = one();
                else if (key == "thickness") link.thickness_px = one();
                else if (key == "intensity") link.intensity = int(one());
                else if (key == "angle0") link.angle0 = one();
                else if (key == "velocity0") link.velocity0 = one();
                else if (key == "segment") {
                    if (toks.size() != 2) p.fail("segment expects 'frames accel'");
                    AngleSegment seg{long(p.num(toks[0], "segment frames")),
                                     p.num(toks[1], "segment accel")};
                    if (seg.frames <= 0) p.fail("segment frames must be > 0");
                    link.segments.push_back(seg);
                } else if (key == "texture") {
                    if (toks.size() != 2) p.fail("texture expects 'amp scale'");
                    link.texture_amp = p.num(toks[0], "texture amp");
                    link.texture_scale = p.num(toks[1], "texture scale");
                } else p.fail("unknown link key " + key);
                break;
            }
            case Section::Occlusion: {
                OcclusionSpec& occ = spec.occlusions.back();
                if (key == "frames") {
                    if (toks.size() != 2) p.fail("frames expects 'first last'");
                    occ.first_frame = long(p.num(toks[0], "first frame"));
                    occ.last_frame = long(p.num(toks[1], "last frame"));
                } else if (key == "rect") {
                    if (toks.size() != 4) p.fail("rect expects 'x y w h'");
                    occ.x = int(p.num(toks[0], "rect x"));
                    occ.y = int(p.num(toks[1], "rect y"));
                    occ.w = int(p.num(toks[2], "rect w"));
                    occ.h = int(p.num(toks[3], "rect h"));
                } else if (key == "fill") occ.fill = int(one());
                else p.fail("unknown occlusion key " + key);
                break;
            }
        }
    }

    if (!pivot_seen) spec.pivot = {spec.width / 2.0, spec.height / 2.0};
    p.line_no = 0;
    try {
        spec.validate();
    } catch (const Error& err) {
        throw Error(ErrorCode::ConfigParse, origin + ": " + err.what());
    }
    return spec;
}

SyntheticSpec parse_synthetic_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigParse, path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_synthetic_spec_text(ss.str(), path);
}

void write_ground_truth_csv(const std::string& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::DecodeFailure, path + ": cannot open for writing");
    out << "frame,link,angle_rad,angular_velocity_rad_per_frame,"
           "angular_acceleration_rad_per_frame2,occluded_fraction\n";
    char buf[160];
    for (long k = 0; k < truth.frames; ++k) {
        for (size_t i = 0; i < truth.n_links; ++i) {
            std::snprintf(buf, sizeof buf, "%ld,%zu,%.9g,%.9g,%.9g,%.9g\n", k, i,
                          truth.angle[size_t(k)][i], truth.velocity[size_t(k)][i],
                          truth.accel[size_t(k)][i], truth.occluded_fraction[size_t(k)][i]);
            out << buf;
        }
    }
}

}  // namespace imimic
