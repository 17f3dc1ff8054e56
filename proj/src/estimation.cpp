#include "imimic/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace imimic {

MotionEstimate estimate_motion(const std::vector<ObjectObservation>& observations) {
    size_t valid = 0;
    for (const auto& o : observations) valid += o.valid;
    if (valid < 2)
        throw Error(ErrorCode::InsufficientObservations,
                    std::to_string(valid) + " usable observations, need 2");

    MotionEstimate est;
    const size_t n = observations.size();
    est.V.assign(n - 1, Vec2{});
    est.V_valid.assign(n - 1, false);
    for (size_t i = 1; i < n; ++i) {
        if (observations[i].valid && observations[i - 1].valid) {
            est.V[i - 1] = observations[i].location() - observations[i - 1].location();
            est.V_valid[i - 1] = true;
        }
    }
    est.A.assign(n >= 2 ? n - 2 : 0, Vec2{});
    est.A_valid.assign(est.A.size(), false);
    for (size_t i = 1; i < est.V.size(); ++i) {
        if (est.V_valid[i] && est.V_valid[i - 1]) {
            est.A[i - 1] = est.V[i] - est.V[i - 1];
            est.A_valid[i - 1] = true;
        }
    }
    return est;
}

std::vector<double> bearing_series(const std::vector<Vec2>& positions, Vec2 pivot) {
    std::vector<double> out;
    out.reserve(positions.size());
    for (const Vec2& p : positions) out.push_back(std::atan2(p.y - pivot.y, p.x - pivot.x));
    return out;
}

void angular_kinematics(const std::vector<ObjectObservation>& observations,
                        MotionEstimate& estimate) {
    std::vector<double> lengths;
    for (const auto& o : observations)
        if (o.valid) lengths.push_back(o.skeleton.length_px);
    if (lengths.empty()) throw Error(ErrorCode::ZeroRadius, "no valid observations");
    std::sort(lengths.begin(), lengths.end());
    size_t mid = lengths.size() / 2;
    estimate.r_px = lengths.size() % 2 ? lengths[mid]
                                       : 0.5 * (lengths[mid - 1] + lengths[mid]);
    if (estimate.r_px <= 0.0)
        throw Error(ErrorCode::ZeroRadius, "median skeleton length is zero");

    const size_t n = observations.size();
    std::vector<double> phi(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        if (!observations[i].valid) continue;
        Vec2 d = observations[i].distal_px.to_vec() - observations[i].pivot_px.to_vec();
        phi[i] = std::atan2(d.y, d.x);
    }

    estimate.omega.assign(estimate.V.size(), 0.0);
    for (size_t i = 1; i < n; ++i)
        if (estimate.V_valid[i - 1]) estimate.omega[i - 1] = wrap_angle(phi[i] - phi[i - 1]);

    estimate.alpha.assign(estimate.A.size(), 0.0);
    for (size_t i = 1; i < estimate.omega.size(); ++i)
        if (estimate.A_valid[i - 1])
            estimate.alpha[i - 1] = estimate.omega[i] - estimate.omega[i - 1];
}

RegionTrack region_track(const std::vector<ObjectObservation>& observations) {
    RegionTrack track;
    track.areas.reserve(observations.size());
    for (const auto& o : observations) track.areas.push_back(double(o.area_px));
    return track;
}

double trust_factor(const RegionTrack& track) {
    if (track.areas.empty()) return 0.0;
    double max_s = *std::max_element(track.areas.begin(), track.areas.end());
    if (max_s <= 0.0) return 0.0;
    double ref = track.areas.front();
    double max_dev = 0.0;
    for (size_t i = 1; i < track.areas.size(); ++i)
        max_dev = std::max(max_dev, std::abs(ref - track.areas[i]));
    return 1.0 - max_dev / max_s;
}

std::vector<double> torque(const std::vector<double>& alpha_physical, double inertia) {
    if (inertia <= 0.0)
        throw Error(ErrorCode::NonPositiveInertia, "inertia " + std::to_string(inertia));
    std::vector<double> out;
    out.reserve(alpha_physical.size());
    for (double a : alpha_physical) out.push_back(inertia * a);
    return out;
}

}  // namespace imimic
