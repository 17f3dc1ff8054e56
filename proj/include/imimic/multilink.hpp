#ifndef IMIMIC_MULTILINK_HPP
#define IMIMIC_MULTILINK_HPP

#include <vector>

#include "imimic/don.hpp"

namespace imimic {

// Total-least-squares line over one skeleton stretch. The direction is unit
// length and oriented along the path (proximal to distal).
struct LineModel {
    Vec2 direction;
    Vec2 point;          // centroid of the fitted pixels
    size_t inlier_count = 0;
    Vec2 span_begin;
    Vec2 span_end;
};

struct SegmentationResult {
    std::vector<LineModel> models;   // ordered by distance from the path origin
    bool under_segmented = false;    // fewer than n_links groups achievable
};

struct SegmentationParams {
    double split_residual_px = 2.5;  // split when the worst chord deviation exceeds this
    size_t min_segment_px = 8;
};

// Partitions the ordered skeleton path into straight stretches: cut at the
// pixel farthest from the endpoint chord, repeat until n_links segments exist
// or every deviation is inside tolerance, then fit each stretch by total
// least squares.
SegmentationResult segment_and_fit(const std::vector<Pix>& skeleton_path, size_t n_links,
                                   const SegmentationParams& params = {});

struct ChainAngles {
    std::vector<double> joints;  // [0] vs reference axis, rest between neighbors
};

// Signed angles: entry 0 between the reference axis and the first model, then
// one entry per consecutive model pair.
ChainAngles chain_angles(const std::vector<LineModel>& models, Vec2 reference_axis);

}  // namespace imimic

#endif
