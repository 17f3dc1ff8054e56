#ifndef IMIMIC_SYNTHETIC_HPP
#define IMIMIC_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "imimic/image.hpp"

namespace imimic {

// One piece of a piecewise constant-acceleration angle program.
struct AngleSegment {
    long frames = 0;
    double accel = 0.0;  // rad/frame^2
};

struct LinkSpec {
    double length_px = 80.0;
    double thickness_px = 8.0;
    int intensity = -1;  // -1 = pick a distinct default per link
    double angle0 = 0.0;          // rad; absolute for link 0, relative to parent otherwise
    double velocity0 = 0.0;       // rad/frame
    std::vector<AngleSegment> segments;
    // Optional speckle texture rigid with the link; zero amp = flat fill.
    double texture_amp = 0.0;
    double texture_scale = 8.0;
};

struct OcclusionSpec {
    long first_frame = 0;
    long last_frame = 0;  // inclusive
    int x = 0, y = 0, w = 0, h = 0;
    int fill = 0;
};

struct SyntheticSpec {
    int width = 320;
    int height = 240;
    long frames = 0;
    double fps = 30.0;
    uint64_t seed = 0;
    int background = 20;
    int noise_amplitude = 0;
    Vec2 pivot{160.0, 120.0};
    std::vector<LinkSpec> links;
    std::vector<OcclusionSpec> occlusions;

    void validate() const;  // throws ConfigParse / LinkOutOfFrame-adjacent issues
};

// Analytic per-frame truth. Angles are the program (joint) angles: absolute
// for link 0, relative to the parent for the rest. Velocity rows are the
// exact first differences of the angle rows, acceleration rows the exact
// first differences of the velocity rows.
struct GroundTruth {
    long frames = 0;
    size_t n_links = 0;
    // Indexed [frame][link].
    std::vector<std::vector<double>> angle;
    std::vector<std::vector<double>> velocity;
    std::vector<std::vector<double>> accel;
    std::vector<std::vector<double>> occluded_fraction;
};

struct SyntheticScene {
    std::vector<Frame> frames;
    GroundTruth truth;
};

// Evaluates the discrete angle program for every link: angle[k][i] etc.
// Shared by the renderer and by tests that need truth without pixels.
GroundTruth evaluate_programs(const SyntheticSpec& spec);

// Renders the full sequence. Deterministic: same spec -> identical bytes.
// Throws LinkOutOfFrame naming the first offending frame.
SyntheticScene render_synthetic(const SyntheticSpec& spec);

// Single-frame body masks (one per link, plus their union), before occlusion
// and noise. This is the object-identification oracle for shape-level tests.
struct FrameMasks {
    std::vector<BinaryMask> links;
    BinaryMask combined;
};
FrameMasks render_frame_masks(const SyntheticSpec& spec, long frame_index);

SyntheticSpec parse_synthetic_spec(const std::string& path);
SyntheticSpec parse_synthetic_spec_text(const std::string& text, const std::string& origin);

void write_ground_truth_csv(const std::string& path, const GroundTruth& truth);

}  // namespace imimic

#endif
