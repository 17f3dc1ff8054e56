#ifndef IMIMIC_PREDICTION_HPP
#define IMIMIC_PREDICTION_HPP

#include <vector>

#include "imimic/estimation.hpp"

namespace imimic {

// Velocity/acceleration sets carried over from the previous tick. |A_prev|
// is always |V_prev| - 1.
struct PredictionState {
    std::vector<Vec2> V_prev;
    std::vector<Vec2> A_prev;

    bool initialized() const { return V_prev.size() >= 2; }
};

// Strict comparison: predict only when trust drops below the threshold.
inline bool should_predict(double eta, double threshold) { return eta < threshold; }

struct ReliabilityResult {
    int k = 0;                       // contiguous rejected frames at the newest end
    int mid_window_rejections = 0;   // failures that recovered before the tail

    bool all_rejected(size_t n) const { return size_t(k) == n; }
};

// Counts frames whose area deviates from the oldest frame's by at least
// change_fraction * max(S), scanning from the newest frame backwards and
// stopping at the first conforming frame. If every comparison fails, the
// reference frame itself has nothing to vouch for it and all N frames are
// rejected (k == N); the caller then predicts from the previous sets alone.
ReliabilityResult filter_reliable(const RegionTrack& track, double change_fraction);

struct PredictionOutput {
    std::vector<Vec2> V;  // same length as the current V
    std::vector<Vec2> A;  // one shorter
};

// Forward-difference extrapolation. The previous sets are concatenated with
// the reliable prefix of the current ones (newest k velocity entries
// dropped), then elements are appended one at a time:
//
//   v_next = v_last + a_last
//   a_next = a_last + a'_last
//
// where a'_last is the latest second difference, until the combined velocity
// set reaches twice its per-tick length. The last |V| velocities and |A|
// accelerations come back; with k = 0 that is exactly (V, A).
PredictionOutput predict(const PredictionState& state, const std::vector<Vec2>& V,
                         const std::vector<Vec2>& A, int k);

// Stores the tick's final sets for the next execution. Called on every
// tick, predicted or not.
void commit(PredictionState& state, const std::vector<Vec2>& V, const std::vector<Vec2>& A);

}  // namespace imimic

#endif
