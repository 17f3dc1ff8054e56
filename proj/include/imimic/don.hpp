#ifndef IMIMIC_DON_HPP
#define IMIMIC_DON_HPP

#include <optional>
#include <vector>

#include "imimic/image.hpp"
#include "imimic/window.hpp"

namespace imimic {

// First-order differences between consecutive frames, newest pair first:
// result[p] = binarize(|blur(f_{t-p}) - blur(f_{t-p-1})|), p = 0..N-1.
std::vector<BinaryMask> delta1(const FrameWindow& window, int threshold);

// Differences against the current frame, shortest lag first:
// result[i] = binarize(|blur(f_t) - blur(f_{t-(i+1)})|), i = 0..N-1.
std::vector<BinaryMask> delta2(const FrameWindow& window, int threshold);

struct CleanupOptions {
    bool opening = true;            // one 3x3 binary opening
    bool largest_component = true;  // keep the largest 8-connected component

    static CleanupOptions none() { return {false, false}; }
};

// Intersection of one first-order mask with the union of all second-order
// masks, optionally followed by cleanup. Empty result = no motion evidence
// in that frame; the caller decides whether that is an error.
BinaryMask locate_object(const std::vector<BinaryMask>& delta2_all,
                         const BinaryMask& delta1_p,
                         const CleanupOptions& cleanup = {});

// Same, with the union precomputed (one union per tick, not per frame).
BinaryMask locate_object_with_union(const BinaryMask& delta2_union,
                                    const BinaryMask& delta1_p,
                                    const CleanupOptions& cleanup = {});

BinaryMask binary_opening_3x3(const BinaryMask& mask);
BinaryMask largest_component_8(const BinaryMask& mask);

struct Skeleton {
    std::vector<Pix> pixels;  // every thinned pixel, row-major order
    std::vector<Pix> path;    // longest path, endpoint to endpoint
    double length_px = 0.0;   // 1 per axis step, sqrt(2) per diagonal step
};

// Zhang-Suen thinning followed by longest-path extraction. Throws
// DegenerateBlob when the mask has fewer than 3 pixels.
Skeleton skeletonize(const BinaryMask& mask);
std::optional<Skeleton> try_skeletonize(const BinaryMask& mask);

struct ObjectObservation {
    long frame_index = -1;
    BinaryMask mask;
    size_t area_px = 0;
    Skeleton skeleton;       // path runs pivot -> distal
    Pix pivot_px;
    Pix distal_px;
    bool valid = false;      // false = no usable object in this frame

    Vec2 location() const { return distal_px.to_vec(); }
};

struct ObserveParams {
    int threshold = 25;
    CleanupOptions cleanup{};
};

// Runs the difference layers and object identification for every frame the
// window covers. Observations come back oldest first (result[j] belongs to
// frame t-N+1+j); frames without a usable object are returned invalid.
// Throws AllFramesEmpty when no frame shows any motion.
std::vector<ObjectObservation> observe(const FrameWindow& window, const ObserveParams& params);

}  // namespace imimic

#endif
