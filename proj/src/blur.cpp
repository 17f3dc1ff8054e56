#include "imimic/blur.hpp"

#include <algorithm>
#include <cmath>

namespace imimic {

GaussianBlur::GaussianBlur(BlurParams params) : params_(params) {
    if (!params_.valid())
        throw Error(ErrorCode::ConfigParse, "blur kernel must be odd and sigma positive");
    int k = params_.kernel;
    kernel_.resize(k);
    int r = k / 2;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        double d = i - r;
        kernel_[i] = float(std::exp(-(d * d) / (2.0 * params_.sigma * params_.sigma)));
        sum += kernel_[i];
    }
    for (auto& w : kernel_) w = float(w / sum);
}

Plane GaussianBlur::apply(const Plane& src) {
    if (params_.kernel == 1) return src;

    const int w = src.width();
    const int h = src.height();
    const int r = params_.kernel / 2;
    scratch_.resize(size_t(w) * h);

    // Horizontal pass into float scratch.
    for (int y = 0; y < h; ++y) {
        const uint8_t* row = src.data() + size_t(y) * w;
        float* out = scratch_.data() + size_t(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0.f;
            for (int i = -r; i <= r; ++i) {
                int xi = std::clamp(x + i, 0, w - 1);
                acc += kernel_[i + r] * row[xi];
            }
            out[x] = acc;
        }
    }

    // Vertical pass back to 8 bits.
    Plane dst(w, h);
    for (int y = 0; y < h; ++y) {
        uint8_t* out = dst.data() + size_t(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0.f;
            for (int i = -r; i <= r; ++i) {
                int yi = std::clamp(y + i, 0, h - 1);
                acc += kernel_[i + r] * scratch_[size_t(yi) * w + x];
            }
            out[x] = uint8_t(std::lround(std::clamp(acc, 0.f, 255.f)));
        }
    }
    return dst;
}

}  // namespace imimic
