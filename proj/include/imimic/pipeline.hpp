#ifndef IMIMIC_PIPELINE_HPP
#define IMIMIC_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "imimic/actuation.hpp"
#include "imimic/multilink.hpp"
#include "imimic/prediction.hpp"
#include "imimic/synthetic.hpp"

namespace imimic {

struct PipelineConfig {
    int window = 10;  // N: predecessors kept alongside the current frame
    BlurParams blur{15, 2.5};
    int threshold = 25;
    double eta_threshold = 0.5;
    double area_change_fraction = 0.05;
    size_t n_links = 1;
    double fps = 30.0;
    double initial_angle_rad = 0.0;
    Calibration calibration = Calibration::identity();
    JointLimits limits{};
    SegmentationParams segmentation{};
    std::string debug_dir;

    void validate() const;
};

// Inputs and outputs of one extrapolation call, kept verbatim so tests can
// replay the recursion independently.
struct PredictionTrace {
    std::vector<Vec2> V_prev, A_prev;
    std::vector<Vec2> V_in, A_in;
    int k = 0;
    std::vector<Vec2> V_out, A_out;
};

struct TickResult {
    long frame_index = -1;
    bool no_motion = false;
    MotionEstimate estimate;
    double omega_newest = 0.0;  // rad/frame, measured or predicted
    double alpha_newest = 0.0;  // rad/frame^2
    double angle_estimate_rad = 0.0;  // accumulated command angle, joint 0
    std::optional<ChainAngles> chain;
    JointCommand command;
    std::optional<PredictionTrace> trace;
    double elapsed_ms = 0.0;
};

// Streaming executor: feed frames, collect one TickResult per frame once the
// first window has filled (the first N+1 frames are warm-up and yield none).
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);

    std::optional<TickResult> push(Frame frame);

    const PipelineConfig& config() const { return config_; }
    const TrajectoryLog& log() const { return log_; }
    TrajectoryLog take_log() { return std::move(log_); }

private:
    TickResult tick();

    PipelineConfig config_;
    FrameWindow window_;
    PredictionState prediction_;
    ServoSimulator servo_;
    TrajectoryLog log_;
    size_t frames_seen_ = 0;
    std::vector<double> joint_angles_;  // accumulated command angles
};

struct SequenceResult {
    std::vector<TickResult> ticks;
    TrajectoryLog log;
};

SequenceResult run_sequence(const std::vector<Frame>& frames, const PipelineConfig& config);

struct BenchRow {
    int height = 0;
    int width = 0;
    size_t ticks = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
};

// Renders a standard rotating-link scene at each resolution and measures
// per-tick latency. Resolutions are (height, width) pairs.
std::vector<BenchRow> benchmark(const PipelineConfig& config,
                                const std::vector<std::pair<int, int>>& resolutions,
                                long frames_per_resolution = 80);

// key = value file, same keys as the CLI flags; unknown keys are errors.
PipelineConfig parse_pipeline_config(const std::string& path, PipelineConfig base = {});

}  // namespace imimic

#endif
