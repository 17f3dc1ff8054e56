#include "imimic/image.hpp"

#include <cstdlib>

namespace imimic {

namespace {

void require_same_shape(const Plane& a, const Plane& b) {
    if (!a.same_shape(b))
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                        std::to_string(b.width()) + "x" + std::to_string(b.height()));
}

}  // namespace

BinaryMask& BinaryMask::operator|=(const BinaryMask& o) {
    require_same_shape(plane_, o.plane_);
    auto& dst = plane_.pixels();
    const auto& src = o.plane_.pixels();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
    return *this;
}

BinaryMask& BinaryMask::operator&=(const BinaryMask& o) {
    require_same_shape(plane_, o.plane_);
    auto& dst = plane_.pixels();
    const auto& src = o.plane_.pixels();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] &= src[i];
    return *this;
}

bool BinaryMask::subset_of(const BinaryMask& o) const {
    require_same_shape(plane_, o.plane_);
    const auto& a = plane_.pixels();
    const auto& b = o.plane_.pixels();
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] && !b[i]) return false;
    return true;
}

std::vector<Pix> BinaryMask::set_pixels() const {
    std::vector<Pix> out;
    for (int y = 0; y < height(); ++y)
        for (int x = 0; x < width(); ++x)
            if (test(x, y)) out.push_back({x, y});
    return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    BinaryMask r = a;
    r |= b;
    return r;
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    BinaryMask r = a;
    r &= b;
    return r;
}

Plane abs_diff(const Plane& a, const Plane& b) {
    require_same_shape(a, b);
    Plane out(a.width(), a.height());
    const auto& pa = a.pixels();
    const auto& pb = b.pixels();
    auto& po = out.pixels();
    for (size_t i = 0; i < po.size(); ++i) {
        int d = int(pa[i]) - int(pb[i]);
        po[i] = uint8_t(d < 0 ? -d : d);
    }
    return out;
}

BinaryMask binarize(const Plane& image, int threshold) {
    BinaryMask out(image.width(), image.height());
    const auto& src = image.pixels();
    auto& dst = out.plane().pixels();
    for (size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > threshold ? BinaryMask::kSet : 0;
    return out;
}

}  // namespace imimic
