#ifndef IMIMIC_ESTIMATION_HPP
#define IMIMIC_ESTIMATION_HPP

#include <vector>

#include "imimic/don.hpp"

namespace imimic {

// First and second differences of the tracked endpoint positions, oldest
// first. With n usable position samples, V holds n-1 entries and A holds
// n-2; entries touching an invalid observation carry valid = false and a
// zero value so positional bookkeeping survives occlusion gaps.
struct MotionEstimate {
    std::vector<Vec2> V;
    std::vector<Vec2> A;
    std::vector<bool> V_valid;
    std::vector<bool> A_valid;

    std::vector<double> omega;  // rad/frame, parallel to V
    std::vector<double> alpha;  // rad/frame^2, parallel to A
    double r_px = 0.0;          // median skeleton length over valid observations

    double eta = 0.0;
    bool predicted = false;
};

// Object size per frame across the window, oldest first. The oldest entry is
// the reference the change criterion compares against.
struct RegionTrack {
    std::vector<double> areas;
};

// V and A from observation positions; requires at least 2 valid observations.
MotionEstimate estimate_motion(const std::vector<ObjectObservation>& observations);

// Fills omega/alpha/r_px. Angular velocity is the wrapped difference of
// consecutive endpoint bearings about the per-frame pivot; |v|/r is reserved
// for analytic cross-checks, not used here. Throws ZeroRadius when the
// median skeleton length vanishes.
void angular_kinematics(const std::vector<ObjectObservation>& observations,
                        MotionEstimate& estimate);

// Same bearing-series computation from raw positions about a fixed pivot;
// shared by the prediction path, which rebuilds positions from velocities.
std::vector<double> bearing_series(const std::vector<Vec2>& positions, Vec2 pivot);

RegionTrack region_track(const std::vector<ObjectObservation>& observations);

// eta = 1 - max(S_d)/max(S) with S_d the absolute deviations from the oldest
// area. Zero max(S) (nothing visible anywhere) gives eta = 0.
double trust_factor(const RegionTrack& track);

// theta = I * alpha, elementwise. Throws NonPositiveInertia.
std::vector<double> torque(const std::vector<double>& alpha_physical, double inertia);

}  // namespace imimic

#endif
