#ifndef IMIMIC_BLUR_HPP
#define IMIMIC_BLUR_HPP

#include <vector>

#include "imimic/image.hpp"

namespace imimic {

struct BlurParams {
    int kernel = 15;     // odd; 1 disables the blur entirely
    double sigma = 2.5;  // > 0

    bool valid() const { return kernel >= 1 && kernel % 2 == 1 && sigma > 0.0; }
};

// Separable Gaussian with replicated borders. Reusable so per-frame calls do
// not reallocate the float scratch plane.
class GaussianBlur {
public:
    explicit GaussianBlur(BlurParams params);

    Plane apply(const Plane& src);
    const BlurParams& params() const { return params_; }

private:
    BlurParams params_;
    std::vector<float> kernel_;
    std::vector<float> scratch_;
};

}  // namespace imimic

#endif
