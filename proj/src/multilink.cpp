#include "imimic/multilink.hpp"

#include <algorithm>
#include <cmath>

namespace imimic {

namespace {

struct Fit {
    LineModel model;
    double max_residual = 0.0;
    size_t worst_index = 0;  // absolute path index of the worst residual
};

Fit fit_segment(const std::vector<Pix>& path, size_t b, size_t e) {
    Fit fit;
    const size_t n = e - b;
    double mx = 0, my = 0;
    for (size_t i = b; i < e; ++i) {
        mx += path[i].x;
        my += path[i].y;
    }
    mx /= double(n);
    my /= double(n);

    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = b; i < e; ++i) {
        double dx = path[i].x - mx, dy = path[i].y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Principal axis of the scatter; degenerates gracefully for n == 1.
    double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    Vec2 dir{std::cos(angle), std::sin(angle)};
    Vec2 along = path[e - 1].to_vec() - path[b].to_vec();
    if (dir.dot(along) < 0.0) dir = dir * -1.0;

    fit.model.direction = dir;
    fit.model.point = {mx, my};
    fit.model.inlier_count = n;
    fit.model.span_begin = path[b].to_vec();
    fit.model.span_end = path[e - 1].to_vec();

    // Residuals against the endpoint chord, not the fitted axis: on a bent
    // stretch the worst chord deviation sits at the corner, whereas the
    // total-least-squares axis can push its worst residual to a stretch end
    // and the split would shave slivers instead of cutting the corner.
    Vec2 chord = path[e - 1].to_vec() - path[b].to_vec();
    double len = chord.norm();
    Vec2 normal = len > 0.0 ? Vec2{-chord.y / len, chord.x / len} : Vec2{-dir.y, dir.x};
    fit.worst_index = b;
    for (size_t i = b; i < e; ++i) {
        Vec2 d = path[i].to_vec() - path[b].to_vec();
        double r = std::abs(d.dot(normal));
        if (r > fit.max_residual) {
            fit.max_residual = r;
            fit.worst_index = i;
        }
    }
    return fit;
}

}  // namespace

SegmentationResult segment_and_fit(const std::vector<Pix>& skeleton_path, size_t n_links,
                                   const SegmentationParams& params) {
    if (n_links < 1) throw Error(ErrorCode::ConfigParse, "n_links must be >= 1");
    if (skeleton_path.size() < 2)
        throw Error(ErrorCode::DegenerateBlob,
                    "skeleton path has " + std::to_string(skeleton_path.size()) + " pixels");

    const size_t min_px = std::max<size_t>(2, params.min_segment_px);

    struct Range {
        size_t b, e;
        Fit fit;
    };
    std::vector<Range> segments;
    segments.push_back({0, skeleton_path.size(), fit_segment(skeleton_path, 0, skeleton_path.size())});

    while (segments.size() < n_links) {
        // Worst splittable segment first.
        size_t pick = segments.size();
        double worst = params.split_residual_px;
        for (size_t i = 0; i < segments.size(); ++i) {
            const Range& r = segments[i];
            if (r.e - r.b < 2 * min_px) continue;
            if (r.fit.max_residual > worst) {
                worst = r.fit.max_residual;
                pick = i;
            }
        }
        if (pick == segments.size()) break;  // every residual within tolerance

        Range r = segments[size_t(pick)];
        size_t cut = std::clamp(r.fit.worst_index, r.b + min_px, r.e - min_px);
        Range left{r.b, cut, fit_segment(skeleton_path, r.b, cut)};
        Range right{cut, r.e, fit_segment(skeleton_path, cut, r.e)};
        segments[size_t(pick)] = left;
        segments.insert(segments.begin() + long(pick) + 1, right);
    }

    // Fold any fragment below the size floor into its better neighbor.
    while (segments.size() > 1) {
        size_t small = segments.size();
        for (size_t i = 0; i < segments.size(); ++i)
            if (segments[i].e - segments[i].b < min_px &&
                (small == segments.size() ||
                 segments[i].e - segments[i].b < segments[small].e - segments[small].b))
                small = i;
        if (small == segments.size()) break;
        size_t into = small == 0 ? 1 : small - 1;
        Range merged{std::min(segments[small].b, segments[into].b),
                     std::max(segments[small].e, segments[into].e), {}};
        merged.fit = fit_segment(skeleton_path, merged.b, merged.e);
        segments[std::min(small, into)] = merged;
        segments.erase(segments.begin() + long(std::max(small, into)));
    }

    // The greedy cuts land near corners, not on them; slide each interior
    // boundary to the position that minimizes the two neighbors' summed
    // least-squares energy (smaller covariance eigenvalue, from prefix sums).
    if (segments.size() > 1) {
        const size_t n = skeleton_path.size();
        std::vector<double> px(n + 1, 0), py(n + 1, 0), pxx(n + 1, 0), pyy(n + 1, 0),
            pxy(n + 1, 0);
        for (size_t i = 0; i < n; ++i) {
            double x = skeleton_path[i].x, y = skeleton_path[i].y;
            px[i + 1] = px[i] + x;
            py[i + 1] = py[i] + y;
            pxx[i + 1] = pxx[i] + x * x;
            pyy[i + 1] = pyy[i] + y * y;
            pxy[i + 1] = pxy[i] + x * y;
        }
        auto energy = [&](size_t b, size_t e) {
            double m = double(e - b);
            double sx = px[e] - px[b], sy = py[e] - py[b];
            double sxx = pxx[e] - pxx[b] - sx * sx / m;
            double syy = pyy[e] - pyy[b] - sy * sy / m;
            double sxy = pxy[e] - pxy[b] - sx * sy / m;
            double spread = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) + 4 * sxy * sxy));
            return 0.5 * (sxx + syy - spread);
        };
        for (int sweep = 0; sweep < 4; ++sweep) {
            bool moved = false;
            for (size_t i = 0; i + 1 < segments.size(); ++i) {
                size_t lo = segments[i].b + min_px;
                size_t hi = segments[i + 1].e - min_px;
                if (lo > hi) continue;
                size_t best = segments[i].e;
                double best_cost = 1e300;
                for (size_t c = lo; c <= hi; ++c) {
                    double cost = energy(segments[i].b, c) + energy(c, segments[i + 1].e);
                    if (cost < best_cost) {
                        best_cost = cost;
                        best = c;
                    }
                }
                if (best != segments[i].e) {
                    segments[i].e = best;
                    segments[i + 1].b = best;
                    moved = true;
                }
            }
            if (!moved) break;
        }
        for (auto& s : segments) s.fit = fit_segment(skeleton_path, s.b, s.e);
    }

    SegmentationResult out;
    for (auto& s : segments) out.models.push_back(s.fit.model);
    out.under_segmented = out.models.size() < n_links;
    return out;
}

ChainAngles chain_angles(const std::vector<LineModel>& models, Vec2 reference_axis) {
    ChainAngles out;
    if (models.empty()) return out;
    if (reference_axis.norm() == 0.0)
        throw Error(ErrorCode::ConfigParse, "reference axis must be nonzero");

    Vec2 prev = reference_axis;
    for (const auto& m : models) {
        out.joints.push_back(std::atan2(prev.cross(m.direction), prev.dot(m.direction)));
        prev = m.direction;
    }
    return out;
}

}  // namespace imimic
