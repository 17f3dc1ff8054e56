#include "imimic/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace imimic {

namespace {

double rate_factor(const Calibration& cal, Quantity q) {
    switch (q) {
        case Quantity::Length: return 1.0;
        case Quantity::AngularVelocity: return cal.fps;
        case Quantity::AngularAcceleration: return cal.fps * cal.fps;
    }
    return 1.0;
}

const std::optional<double>& ratio_for(const Calibration& cal, Quantity q) {
    return q == Quantity::Length ? cal.length_ratio : cal.angular_velocity_ratio;
}

const char* quantity_name(Quantity q) {
    switch (q) {
        case Quantity::Length: return "length";
        case Quantity::AngularVelocity: return "angular_velocity";
        case Quantity::AngularAcceleration: return "angular_acceleration";
    }
    return "?";
}

}  // namespace

void calibrate(Calibration& cal, Quantity quantity, double known_physical,
               double measured_px) {
    if (known_physical <= 0.0 || measured_px <= 0.0)
        throw Error(ErrorCode::NonPositiveInput,
                    std::string("calibrating ") + quantity_name(quantity) + " with known " +
                        std::to_string(known_physical) + ", measured " +
                        std::to_string(measured_px));
    double ratio = measured_px * rate_factor(cal, quantity) / known_physical;
    if (quantity == Quantity::Length)
        cal.length_ratio = ratio;
    else
        cal.angular_velocity_ratio = ratio;
}

double map_to_physical(const Calibration& cal, double raw, Quantity quantity) {
    const auto& ratio = ratio_for(cal, quantity);
    if (!ratio)
        throw Error(ErrorCode::UncalibratedQuantity, quantity_name(quantity));
    return raw * rate_factor(cal, quantity) / *ratio;
}

void JointLimits::validate() const {
    if (!(min_rad < max_rad))
        throw Error(ErrorCode::JointLimitConfig,
                    "travel range [" + std::to_string(min_rad) + ", " +
                        std::to_string(max_rad) + "] is empty");
    if (!(max_speed_rad_s > 0.0))
        throw Error(ErrorCode::JointLimitConfig,
                    "max speed " + std::to_string(max_speed_rad_s) + " must be positive");
}

ServoSimulator::ServoSimulator(size_t n_joints, JointLimits limits, double fps)
    : limits_(limits) {
    limits_.validate();
    if (fps <= 0.0) throw Error(ErrorCode::ConfigParse, "fps must be positive");
    if (n_joints == 0) throw Error(ErrorCode::JointLimitConfig, "need at least one joint");
    dt_ = 1.0 / fps;
    double start = std::clamp(0.0, limits_.min_rad, limits_.max_rad);
    positions_.assign(n_joints, start);
}

const std::vector<double>& ServoSimulator::step(const std::vector<double>& targets) {
    if (targets.size() != positions_.size())
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(targets.size()) + " targets for " +
                        std::to_string(positions_.size()) + " joints");
    const double max_step = limits_.max_speed_rad_s * dt_;
    for (size_t i = 0; i < positions_.size(); ++i) {
        double delta = std::clamp(targets[i] - positions_[i], -max_step, max_step);
        positions_[i] = std::clamp(positions_[i] + delta, limits_.min_rad, limits_.max_rad);
    }
    return positions_;
}

TrajectoryLog simulate(const std::vector<JointCommand>& commands, const Calibration& cal,
                       const JointLimits& limits) {
    TrajectoryLog log;
    if (commands.empty()) return log;
    log.n_joints = commands.front().targets.size();
    ServoSimulator servo(log.n_joints, limits, cal.fps);
    for (const auto& cmd : commands) {
        if (cmd.targets.size() != log.n_joints)
            throw Error(ErrorCode::DimensionMismatch,
                        "command at tick " + std::to_string(cmd.tick) + " has " +
                            std::to_string(cmd.targets.size()) + " targets, expected " +
                            std::to_string(log.n_joints));
        TrajectoryRow row;
        row.tick = cmd.tick;
        row.cmd_angles = cmd.targets;
        row.exec_angles = servo.step(cmd.targets);
        row.error_rad = row.cmd_angles[0] - row.exec_angles[0];
        log.rows.push_back(std::move(row));
    }
    return log;
}

TrackingError tracking_error(const TrajectoryLog& log) {
    TrackingError err;
    const size_t n = log.rows.size();
    if (n == 0) return err;

    std::vector<double> cmd(n), exec(n);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cmd[i] = log.rows[i].cmd_angles.empty() ? 0.0 : log.rows[i].cmd_angles[0];
        exec[i] = log.rows[i].exec_angles.empty() ? 0.0 : log.rows[i].exec_angles[0];
        double e = std::abs(cmd[i] - exec[i]);
        sum += e;
        err.max_abs_error = std::max(err.max_abs_error, e);
    }
    err.mean_abs_error = sum / double(n);

    double cmean = 0.0, emean = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cmean += cmd[i];
        emean += exec[i];
    }
    cmean /= double(n);
    emean /= double(n);

    // Executed trails commanded; scan nonnegative lags only.
    double best = -1e300;
    long best_lag = 0;
    long max_lag = long(n) / 2;
    for (long lag = 0; lag <= max_lag; ++lag) {
        double corr = 0.0;
        size_t count = 0;
        for (size_t i = 0; i + size_t(lag) < n; ++i) {
            corr += (cmd[i] - cmean) * (exec[i + size_t(lag)] - emean);
            ++count;
        }
        if (count == 0) break;
        corr /= double(count);
        if (corr > best) {
            best = corr;
            best_lag = lag;
        }
    }
    err.lag_frames = best_lag;
    return err;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
    out << "tick,eta,predicted,omega_px,omega_phys,alpha_phys,torque,cmd_angle_rad";
    if (log.n_joints > 1)
        for (size_t i = 0; i < log.n_joints; ++i) out << ",joint" << i << "_angle_rad";
    out << ",exec_angle_rad,error_rad,elapsed_ms\n";

    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        out << ',' << buf;
    };
    for (const auto& row : log.rows) {
        out << row.tick;
        put(row.eta);
        out << ',' << (row.predicted ? 1 : 0);
        put(row.omega_px);
        put(row.omega_phys);
        put(row.alpha_phys);
        put(row.torque);
        put(row.cmd_angles.empty() ? 0.0 : row.cmd_angles[0]);
        if (log.n_joints > 1) {
            for (size_t i = 0; i < log.n_joints; ++i)
                put(i < row.chain_angles.size() ? row.chain_angles[i]
                    : i < row.cmd_angles.size() ? row.cmd_angles[i]
                                                : 0.0);
        }
        put(row.exec_angles.empty() ? 0.0 : row.exec_angles[0]);
        put(row.error_rad);
        put(row.elapsed_ms);
        out << '\n';
    }
}

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::DecodeFailure, path + ": cannot open for writing");
    write_trajectory_csv(out, log);
}

std::vector<JointCommand> read_command_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::DecodeFailure, path + ": cannot open");

    std::string header;
    if (!std::getline(in, header))
        throw Error(ErrorCode::DecodeFailure, path + ": empty file");

    std::vector<std::string> cols;
    {
        std::istringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    long tick_col = -1, cmd_col = -1;
    std::vector<std::pair<size_t, long>> joint_cols;  // (joint index, column)
    for (size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "tick") tick_col = long(i);
        else if (cols[i] == "cmd_angle_rad") cmd_col = long(i);
        else if (cols[i].rfind("joint", 0) == 0) {
            auto us = cols[i].find('_');
            if (us != std::string::npos && cols[i].substr(us) == "_angle_rad") {
                try {
                    joint_cols.emplace_back(std::stoul(cols[i].substr(5, us - 5)), long(i));
                } catch (const std::exception&) {}
            }
        }
    }
    if (tick_col < 0 || cmd_col < 0)
        throw Error(ErrorCode::DecodeFailure, path + ": need tick and cmd_angle_rad columns");
    std::sort(joint_cols.begin(), joint_cols.end());

    std::vector<JointCommand> commands;
    std::string line;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        auto field = [&](long idx) -> const std::string& {
            if (idx < 0 || size_t(idx) >= fields.size())
                throw Error(ErrorCode::DecodeFailure,
                            path + ":" + std::to_string(line_no) + ": short row");
            return fields[size_t(idx)];
        };
        try {
            JointCommand cmd;
            cmd.tick = std::stol(field(tick_col));
            cmd.targets.push_back(std::stod(field(cmd_col)));
            for (const auto& [joint, col] : joint_cols) {
                if (joint == 0) continue;  // joint0 duplicates cmd_angle_rad
                cmd.targets.push_back(std::stod(field(col)));
            }
            commands.push_back(std::move(cmd));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(ErrorCode::DecodeFailure,
                        path + ":" + std::to_string(line_no) + ": bad number");
        }
    }
    return commands;
}

}  // namespace imimic
