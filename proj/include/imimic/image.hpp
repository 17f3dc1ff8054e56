#ifndef IMIMIC_IMAGE_HPP
#define IMIMIC_IMAGE_HPP

#include <cstdint>
#include <vector>

#include "imimic/errors.hpp"
#include "imimic/geometry.hpp"

namespace imimic {

// Single-channel 8-bit raster, row-major.
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, uint8_t fill = 0)
        : width_(width), height_(height), data_(size_t(width) * size_t(height), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    uint8_t at(int x, int y) const { return data_[size_t(y) * width_ + x]; }
    uint8_t& at(int x, int y) { return data_[size_t(y) * width_ + x]; }

    const uint8_t* data() const { return data_.data(); }
    uint8_t* data() { return data_.data(); }
    const std::vector<uint8_t>& pixels() const { return data_; }
    std::vector<uint8_t>& pixels() { return data_; }

    bool same_shape(const Plane& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }
    bool operator==(const Plane&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<uint8_t> data_;
};

// One grayscale video frame. Index is the position in the source sequence;
// the timestamp is derived from it, never free-standing.
struct Frame {
    Plane plane;
    long index = 0;
    double timestamp_s = 0.0;

    int width() const { return plane.width(); }
    int height() const { return plane.height(); }
};

inline Frame make_frame(Plane p, long index, double fps) {
    if (p.width() < 8 || p.height() < 8)
        throw Error(ErrorCode::DecodeFailure,
                    "frame " + std::to_string(index) + " smaller than 8x8");
    return Frame{std::move(p), index, fps > 0 ? double(index) / fps : 0.0};
}

// Per-pixel boolean raster; set pixels hold 255, clear pixels 0, so a mask
// round-trips through binarize unchanged.
class BinaryMask {
public:
    static constexpr uint8_t kSet = 255;

    BinaryMask() = default;
    BinaryMask(int width, int height) : plane_(width, height, 0) {}
    explicit BinaryMask(Plane p) : plane_(std::move(p)) {}

    int width() const { return plane_.width(); }
    int height() const { return plane_.height(); }
    bool empty_shape() const { return plane_.empty(); }

    bool test(int x, int y) const { return plane_.at(x, y) != 0; }
    void set(int x, int y, bool v = true) { plane_.at(x, y) = v ? kSet : 0; }

    const Plane& plane() const { return plane_; }
    Plane& plane() { return plane_; }

    size_t count() const {
        size_t n = 0;
        for (uint8_t v : plane_.pixels()) n += v != 0;
        return n;
    }

    bool same_shape(const BinaryMask& o) const { return plane_.same_shape(o.plane_); }
    bool operator==(const BinaryMask&) const = default;

    BinaryMask& operator|=(const BinaryMask& o);
    BinaryMask& operator&=(const BinaryMask& o);

    // True if every set pixel of this mask is set in o.
    bool subset_of(const BinaryMask& o) const;

    std::vector<Pix> set_pixels() const;

private:
    Plane plane_;
};

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);

// |a - b| per pixel; shapes must match.
Plane abs_diff(const Plane& a, const Plane& b);

// Set where value > threshold.
BinaryMask binarize(const Plane& image, int threshold);

// Integer luma, bit-exact on every platform: (77 R + 150 G + 29 B) >> 8.
inline uint8_t luma(uint8_t r, uint8_t g, uint8_t b) {
    return uint8_t((77u * r + 150u * g + 29u * b) >> 8);
}

}  // namespace imimic

#endif
