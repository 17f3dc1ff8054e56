#ifndef IMIMIC_ACTUATION_HPP
#define IMIMIC_ACTUATION_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "imimic/errors.hpp"

namespace imimic {

enum class Quantity { Length, AngularVelocity, AngularAcceleration };

// Optical-to-physical aspect ratios. Angular acceleration shares the angular
// velocity ratio; only the frame->second power differs.
struct Calibration {
    std::optional<double> length_ratio;
    std::optional<double> angular_velocity_ratio;
    double fps = 30.0;
    double inertia = 1.0;
    std::vector<double> link_lengths_m;

    static Calibration identity(double fps = 30.0) {
        Calibration c;
        c.fps = fps;
        c.length_ratio = 1.0;
        c.angular_velocity_ratio = 1.0;
        return c;
    }
};

// ratio = measured (converted to per-second) / known. Throws NonPositiveInput.
void calibrate(Calibration& cal, Quantity quantity, double known_physical,
               double measured_px);

// raw value in the pixel/frame domain -> physical units: convert rates by fps
// (fps^2 for accelerations), then divide by the aspect ratio. Throws
// UncalibratedQuantity when the needed ratio was never set.
double map_to_physical(const Calibration& cal, double raw, Quantity quantity);

struct JointLimits {
    double min_rad = -1.0471975511965976;  // -60 deg
    double max_rad = 1.0471975511965976;   // +60 deg
    double max_speed_rad_s = 4.0;

    void validate() const;
};

struct JointCommand {
    long tick = 0;
    std::vector<double> targets;  // rad, one per joint
};

// First-order position tracker: each tick every joint moves toward its
// target at most max_speed/fps, then is clamped into its travel range.
class ServoSimulator {
public:
    ServoSimulator(size_t n_joints, JointLimits limits, double fps);

    const std::vector<double>& step(const std::vector<double>& targets);
    const std::vector<double>& positions() const { return positions_; }
    const JointLimits& limits() const { return limits_; }

private:
    JointLimits limits_;
    double dt_;
    std::vector<double> positions_;
};

struct TrajectoryRow {
    long tick = 0;
    double eta = 0.0;
    bool predicted = false;
    double omega_px = 0.0;    // rad/frame
    double omega_phys = 0.0;  // rad/s
    double alpha_phys = 0.0;  // rad/s^2
    double torque = 0.0;
    std::vector<double> cmd_angles;
    std::vector<double> chain_angles;  // measured joint angles, multi-link runs only
    std::vector<double> exec_angles;
    double error_rad = 0.0;  // joint 0, commanded - executed
    double elapsed_ms = 0.0;
};

struct TrajectoryLog {
    size_t n_joints = 1;
    std::vector<TrajectoryRow> rows;
};

// Batch replay of a command list through a fresh simulator.
TrajectoryLog simulate(const std::vector<JointCommand>& commands, const Calibration& cal,
                       const JointLimits& limits);

struct TrackingError {
    double mean_abs_error = 0.0;
    double max_abs_error = 0.0;
    long lag_frames = 0;  // argmax cross-correlation, commanded vs executed
};

TrackingError tracking_error(const TrajectoryLog& log);

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
void write_trajectory_csv(const std::string& path, const TrajectoryLog& log);
std::vector<JointCommand> read_command_csv(const std::string& path);

}  // namespace imimic

#endif
