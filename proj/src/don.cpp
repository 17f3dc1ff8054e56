#include "imimic/don.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace imimic {

namespace {

constexpr double kDiag = 1.4142135623730951;  // sqrt(2)

void require_full(const FrameWindow& window) {
    if (!window.full())
        throw Error(ErrorCode::NotInitialized,
                    "window holds " + std::to_string(window.frames_held()) + " of " +
                        std::to_string(window.n() + 1) + " frames");
}

struct Bbox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive; x1 < x0 = empty

    bool empty() const { return x1 < x0 || y1 < y0; }
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

Bbox bbox_of(const BinaryMask& mask) {
    Bbox b{mask.width(), mask.height(), -1, -1};
    for (int y = 0; y < mask.height(); ++y) {
        const uint8_t* row = mask.plane().data() + size_t(y) * mask.width();
        for (int x = 0; x < mask.width(); ++x) {
            if (!row[x]) continue;
            b.x0 = std::min(b.x0, x);
            b.x1 = std::max(b.x1, x);
            b.y0 = std::min(b.y0, y);
            b.y1 = std::max(b.y1, y);
        }
    }
    return b;
}

}  // namespace

std::vector<BinaryMask> delta1(const FrameWindow& window, int threshold) {
    require_full(window);
    std::vector<BinaryMask> out;
    out.reserve(size_t(window.n()));
    for (int p = 0; p < window.n(); ++p)
        out.push_back(binarize(abs_diff(window.blurred(p), window.blurred(p + 1)), threshold));
    return out;
}

std::vector<BinaryMask> delta2(const FrameWindow& window, int threshold) {
    require_full(window);
    std::vector<BinaryMask> out;
    out.reserve(size_t(window.n()));
    for (int p = 1; p <= window.n(); ++p)
        out.push_back(binarize(abs_diff(window.blurred(0), window.blurred(p)), threshold));
    return out;
}

BinaryMask binary_opening_3x3(const BinaryMask& mask) {
    Bbox b = bbox_of(mask);
    BinaryMask out(mask.width(), mask.height());
    if (b.empty()) return out;

    // Erosion: survives only with a full 3x3 neighborhood (image border counts
    // as background).
    BinaryMask eroded(mask.width(), mask.height());
    for (int y = std::max(1, b.y0); y <= std::min(mask.height() - 2, b.y1); ++y) {
        for (int x = std::max(1, b.x0); x <= std::min(mask.width() - 2, b.x1); ++x) {
            bool all = true;
            for (int dy = -1; dy <= 1 && all; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (!mask.test(x + dx, y + dy)) {
                        all = false;
                        break;
                    }
            if (all) eroded.set(x, y);
        }
    }

    for (int y = std::max(0, b.y0 - 1); y <= std::min(mask.height() - 1, b.y1 + 1); ++y) {
        for (int x = std::max(0, b.x0 - 1); x <= std::min(mask.width() - 1, b.x1 + 1); ++x) {
            bool any = false;
            for (int dy = -1; dy <= 1 && !any; ++dy) {
                int yy = y + dy;
                if (yy < 0 || yy >= mask.height()) continue;
                for (int dx = -1; dx <= 1; ++dx) {
                    int xx = x + dx;
                    if (xx < 0 || xx >= mask.width()) continue;
                    if (eroded.test(xx, yy)) {
                        any = true;
                        break;
                    }
                }
            }
            if (any) out.set(x, y);
        }
    }
    return out;
}

BinaryMask largest_component_8(const BinaryMask& mask) {
    Bbox b = bbox_of(mask);
    BinaryMask out(mask.width(), mask.height());
    if (b.empty()) return out;

    std::vector<int> label(mask.plane().size(), 0);
    int next_label = 0;
    int best_label = 0;
    size_t best_size = 0;
    std::vector<size_t> stack;

    const int w = mask.width();
    for (int y = b.y0; y <= b.y1; ++y) {
        for (int x = b.x0; x <= b.x1; ++x) {
            size_t idx = size_t(y) * w + x;
            if (!mask.plane().pixels()[idx] || label[idx]) continue;
            ++next_label;
            size_t size = 0;
            stack.push_back(idx);
            label[idx] = next_label;
            while (!stack.empty()) {
                size_t cur = stack.back();
                stack.pop_back();
                ++size;
                int cy = int(cur / w), cx = int(cur % w);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy) continue;
                        int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= mask.height()) continue;
                        size_t nidx = size_t(ny) * w + nx;
                        if (mask.plane().pixels()[nidx] && !label[nidx]) {
                            label[nidx] = next_label;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
            // Ties keep the first component in row-major order.
            if (size > best_size) {
                best_size = size;
                best_label = next_label;
            }
        }
    }

    for (size_t i = 0; i < label.size(); ++i)
        if (label[i] == best_label) out.plane().pixels()[i] = BinaryMask::kSet;
    return out;
}

BinaryMask locate_object_with_union(const BinaryMask& delta2_union,
                                    const BinaryMask& delta1_p,
                                    const CleanupOptions& cleanup) {
    BinaryMask obj = mask_and(delta2_union, delta1_p);
    if (cleanup.opening && obj.count() > 0) obj = binary_opening_3x3(obj);
    if (cleanup.largest_component && obj.count() > 0) obj = largest_component_8(obj);
    return obj;
}

BinaryMask locate_object(const std::vector<BinaryMask>& delta2_all,
                         const BinaryMask& delta1_p,
                         const CleanupOptions& cleanup) {
    if (delta2_all.empty())
        throw Error(ErrorCode::EmptyObject, "no second-order masks supplied");
    BinaryMask u = delta2_all[0];
    for (size_t i = 1; i < delta2_all.size(); ++i) u |= delta2_all[i];
    BinaryMask obj = locate_object_with_union(u, delta1_p, cleanup);
    if (obj.count() == 0)
        throw Error(ErrorCode::EmptyObject, "no motion evidence in this frame");
    return obj;
}

namespace {

// Zhang-Suen thinning restricted to the blob's bounding box (plus a one-pixel
// background border). Grid holds 0/1 bytes.
struct ThinGrid {
    int w = 0, h = 0;       // padded dimensions
    int off_x = 0, off_y = 0;
    std::vector<uint8_t> g;

    uint8_t& at(int x, int y) { return g[size_t(y) * w + x]; }
    uint8_t at(int x, int y) const { return g[size_t(y) * w + x]; }
};

ThinGrid make_grid(const BinaryMask& mask, const Bbox& b) {
    ThinGrid t;
    t.w = b.width() + 2;
    t.h = b.height() + 2;
    t.off_x = b.x0 - 1;
    t.off_y = b.y0 - 1;
    t.g.assign(size_t(t.w) * t.h, 0);
    for (int y = b.y0; y <= b.y1; ++y)
        for (int x = b.x0; x <= b.x1; ++x)
            if (mask.test(x, y)) t.at(x - t.off_x, y - t.off_y) = 1;
    return t;
}

void thin_pass(ThinGrid& t, int step, bool& changed) {
    std::vector<size_t> kill;
    for (int y = 1; y < t.h - 1; ++y) {
        for (int x = 1; x < t.w - 1; ++x) {
            if (!t.at(x, y)) continue;
            uint8_t p2 = t.at(x, y - 1), p3 = t.at(x + 1, y - 1), p4 = t.at(x + 1, y);
            uint8_t p5 = t.at(x + 1, y + 1), p6 = t.at(x, y + 1), p7 = t.at(x - 1, y + 1);
            uint8_t p8 = t.at(x - 1, y), p9 = t.at(x - 1, y - 1);
            int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
            if (b < 2 || b > 6) continue;
            int a = (p2 == 0 && p3 == 1) + (p3 == 0 && p4 == 1) + (p4 == 0 && p5 == 1) +
                    (p5 == 0 && p6 == 1) + (p6 == 0 && p7 == 1) + (p7 == 0 && p8 == 1) +
                    (p8 == 0 && p9 == 1) + (p9 == 0 && p2 == 1);
            if (a != 1) continue;
            if (step == 0) {
                if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
            } else {
                if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
            }
            kill.push_back(size_t(y) * t.w + x);
        }
    }
    for (size_t idx : kill) t.g[idx] = 0;
    if (!kill.empty()) changed = true;
}

// Farthest node by geodesic distance with axis steps of 1 and diagonal steps
// of sqrt(2). Deterministic: ties resolve toward the smaller node index.
struct FarthestResult {
    int node = -1;
    double dist = 0.0;
    std::vector<int> parent;
};

FarthestResult farthest_from(int start, const std::vector<Pix>& nodes,
                             const std::vector<std::vector<int>>& adj) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nodes.size(), inf);
    FarthestResult res;
    res.parent.assign(nodes.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[size_t(start)] = 0.0;
    pq.push({0.0, start});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[size_t(u)]) continue;
        for (int v : adj[size_t(u)]) {
            int ddx = std::abs(nodes[size_t(u)].x - nodes[size_t(v)].x);
            int ddy = std::abs(nodes[size_t(u)].y - nodes[size_t(v)].y);
            double w = (ddx + ddy == 2) ? kDiag : 1.0;
            if (dist[size_t(u)] + w < dist[size_t(v)]) {
                dist[size_t(v)] = dist[size_t(u)] + w;
                res.parent[size_t(v)] = u;
                pq.push({dist[size_t(v)], v});
            }
        }
    }
    res.node = start;
    res.dist = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (dist[i] == inf) continue;
        if (dist[i] > res.dist) {
            res.dist = dist[i];
            res.node = int(i);
        }
    }
    return res;
}

}  // namespace

std::optional<Skeleton> try_skeletonize(const BinaryMask& mask) {
    if (mask.count() < 3) return std::nullopt;
    Bbox b = bbox_of(mask);
    ThinGrid t = make_grid(mask, b);

    bool changed = true;
    while (changed) {
        changed = false;
        thin_pass(t, 0, changed);
        thin_pass(t, 1, changed);
    }

    Skeleton sk;
    std::vector<int> node_at(t.g.size(), -1);
    for (int y = 1; y < t.h - 1; ++y) {
        for (int x = 1; x < t.w - 1; ++x) {
            if (!t.at(x, y)) continue;
            node_at[size_t(y) * t.w + x] = int(sk.pixels.size());
            sk.pixels.push_back({x + t.off_x, y + t.off_y});
        }
    }
    if (sk.pixels.empty()) return std::nullopt;

    std::vector<std::vector<int>> adj(sk.pixels.size());
    for (size_t i = 0; i < sk.pixels.size(); ++i) {
        int gx = sk.pixels[i].x - t.off_x;
        int gy = sk.pixels[i].y - t.off_y;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (!dx && !dy) continue;
                int v = node_at[size_t(gy + dy) * t.w + (gx + dx)];
                if (v >= 0) adj[i].push_back(v);
            }
        }
    }

    // Double sweep: the skeleton is tree-like, so the farthest pair spans the
    // main branch; the connecting shortest path is the reported path.
    FarthestResult a = farthest_from(0, sk.pixels, adj);
    FarthestResult bres = farthest_from(a.node, sk.pixels, adj);
    sk.length_px = bres.dist;
    for (int v = bres.node; v != -1; v = bres.parent[size_t(v)])
        sk.path.push_back(sk.pixels[size_t(v)]);
    std::reverse(sk.path.begin(), sk.path.end());

    // Thinning nibbles rod ends before they reach single-pixel width; grow
    // each path end back out along its final direction while the mask (and
    // nothing already thinned) continues, so the path spans the full blob.
    auto extend_end = [&](bool back) {
        if (sk.path.size() < 2) return;
        Pix e = back ? sk.path.back() : sk.path.front();
        Pix in = back ? sk.path[sk.path.size() - 2] : sk.path[1];
        int dx = (e.x > in.x) - (e.x < in.x);
        int dy = (e.y > in.y) - (e.y < in.y);
        double step = (dx && dy) ? kDiag : 1.0;
        std::vector<Pix> ext;
        for (Pix q{e.x + dx, e.y + dy};; q = {q.x + dx, q.y + dy}) {
            int gx = q.x - t.off_x, gy = q.y - t.off_y;
            if (gx <= 0 || gy <= 0 || gx >= t.w - 1 || gy >= t.h - 1) break;
            if (!mask.test(q.x, q.y) || t.at(gx, gy)) break;
            t.at(gx, gy) = 1;
            ext.push_back(q);
            sk.pixels.push_back(q);
            sk.length_px += step;
        }
        if (back)
            sk.path.insert(sk.path.end(), ext.begin(), ext.end());
        else
            sk.path.insert(sk.path.begin(), ext.rbegin(), ext.rend());
    };
    extend_end(false);
    extend_end(true);
    return sk;
}

Skeleton skeletonize(const BinaryMask& mask) {
    if (mask.count() < 3)
        throw Error(ErrorCode::DegenerateBlob,
                    "blob has " + std::to_string(mask.count()) + " pixels, need 3");
    auto sk = try_skeletonize(mask);
    if (!sk) throw Error(ErrorCode::DegenerateBlob, "thinning left no pixels");
    return *sk;
}

namespace {

// Pivot selection: the endpoint track that moved least across the window.
void assign_endpoints(std::vector<ObjectObservation>& obs) {
    struct Pair {
        size_t obs_index;
        Pix a, b;  // a/b follow the association chain
    };
    std::vector<Pair> chain;
    for (size_t i = 0; i < obs.size(); ++i) {
        if (!obs[i].valid) continue;
        Pix e0 = obs[i].skeleton.path.front();
        Pix e1 = obs[i].skeleton.path.back();
        if (chain.empty()) {
            if (!yx_less(e0, e1)) std::swap(e0, e1);
            chain.push_back({i, e0, e1});
        } else {
            auto d2 = [](Pix p, Pix q) {
                double dx = p.x - q.x, dy = p.y - q.y;
                return dx * dx + dy * dy;
            };
            const Pair& prev = chain.back();
            double keep = d2(prev.a, e0) + d2(prev.b, e1);
            double swap = d2(prev.a, e1) + d2(prev.b, e0);
            if (swap < keep) std::swap(e0, e1);
            chain.push_back({i, e0, e1});
        }
    }
    if (chain.empty()) return;

    auto variance = [&](bool first) {
        double mx = 0, my = 0;
        for (const Pair& p : chain) {
            Pix q = first ? p.a : p.b;
            mx += q.x;
            my += q.y;
        }
        mx /= double(chain.size());
        my /= double(chain.size());
        double v = 0;
        for (const Pair& p : chain) {
            Pix q = first ? p.a : p.b;
            v += (q.x - mx) * (q.x - mx) + (q.y - my) * (q.y - my);
        }
        return v;
    };

    double va = variance(true);
    double vb = variance(false);
    bool pivot_is_a;
    if (va != vb) {
        pivot_is_a = va < vb;
    } else {
        // Exact tie (pure translation): lexicographically smaller (y, x)
        // endpoint of the newest observation is the pivot.
        const Pair& newest = chain.back();
        pivot_is_a = yx_less(newest.a, newest.b);
    }

    for (const Pair& p : chain) {
        ObjectObservation& o = obs[p.obs_index];
        o.pivot_px = pivot_is_a ? p.a : p.b;
        o.distal_px = pivot_is_a ? p.b : p.a;
        if (!(o.skeleton.path.front() == o.pivot_px))
            std::reverse(o.skeleton.path.begin(), o.skeleton.path.end());
    }
}

}  // namespace

std::vector<ObjectObservation> observe(const FrameWindow& window,
                                       const ObserveParams& params) {
    require_full(window);
    const int n = window.n();

    std::vector<BinaryMask> d1 = delta1(window, params.threshold);
    std::vector<BinaryMask> d2 = delta2(window, params.threshold);
    BinaryMask u = d2[0];
    for (size_t i = 1; i < d2.size(); ++i) u |= d2[i];

    std::vector<ObjectObservation> obs{size_t(n)};
    bool any_valid = false;
    for (int j = 0; j < n; ++j) {
        int p = n - 1 - j;  // oldest pair first
        ObjectObservation& o = obs[size_t(j)];
        o.frame_index = window.frame(p).index;
        o.mask = locate_object_with_union(u, d1[size_t(p)], params.cleanup);
        o.area_px = o.mask.count();
        if (o.area_px == 0) continue;
        auto sk = try_skeletonize(o.mask);
        if (!sk) {
            // too small to skeletonize: report as if nothing usable was seen
            o.mask = BinaryMask(o.mask.width(), o.mask.height());
            o.area_px = 0;
            continue;
        }
        o.skeleton = std::move(*sk);
        o.valid = true;
        any_valid = true;
    }
    if (!any_valid)
        throw Error(ErrorCode::AllFramesEmpty, "no motion evidence anywhere in the window");

    assign_endpoints(obs);
    return obs;
}

}  // namespace imimic
