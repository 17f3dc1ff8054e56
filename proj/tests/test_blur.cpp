#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "imimic/blur.hpp"
#include "imimic/rng.hpp"

using namespace imimic;

namespace {

Plane noise_plane(int w, int h, uint64_t seed) {
    Plane p{w, h};
    SplitMix64 rng(seed);
    for (auto& v : p.pixels()) v = uint8_t(rng.next());
    return p;
}

}  // namespace

TEST_CASE("kernel 1 is a passthrough") {
    Plane p = noise_plane(32, 24, 5);
    GaussianBlur blur({1, 2.5});
    CHECK(blur.apply(p) == p);
}

TEST_CASE("uniform input is unchanged (kernel normalizes to 1)") {
    Plane p{40, 30, 147};
    GaussianBlur blur({15, 2.5});
    Plane out = blur.apply(p);
    for (auto v : out.pixels()) CHECK(v == 147);
}

TEST_CASE("impulse response is symmetric and centered") {
    Plane p{31, 31, 0};
    p.at(15, 15) = 255;
    GaussianBlur blur({15, 2.5});
    Plane out = blur.apply(p);
    CHECK(out.at(15, 15) > out.at(16, 15));
    CHECK(out.at(16, 15) == out.at(14, 15));
    CHECK(out.at(15, 16) == out.at(15, 14));
    CHECK(out.at(16, 16) == out.at(14, 14));
    CHECK(out.at(15, 16) == out.at(16, 15));  // isotropic
    CHECK(out.at(15, 15 + 8) == 0);           // beyond the kernel radius
}

TEST_CASE("blur reduces total variation of noise") {
    Plane p = noise_plane(64, 48, 11);
    GaussianBlur blur({15, 2.5});
    Plane out = blur.apply(p);
    auto tv = [](const Plane& q) {
        long t = 0;
        for (int y = 0; y < q.height(); ++y)
            for (int x = 1; x < q.width(); ++x)
                t += std::abs(int(q.at(x, y)) - int(q.at(x - 1, y)));
        return t;
    };
    CHECK(tv(out) * 5 < tv(p));
}

TEST_CASE("border handling clamps instead of darkening") {
    Plane p{24, 24, 200};
    GaussianBlur blur({15, 2.5});
    Plane out = blur.apply(p);
    CHECK(out.at(0, 0) == 200);
    CHECK(out.at(23, 23) == 200);
}

TEST_CASE("deterministic across calls") {
    Plane p = noise_plane(33, 17, 3);
    GaussianBlur a({9, 1.5}), b({9, 1.5});
    CHECK(a.apply(p) == b.apply(p));
    CHECK(a.apply(p) == a.apply(p));
}

TEST_CASE("even or non-positive kernels are rejected") {
    CHECK_THROWS_AS(GaussianBlur({0, 1.0}), Error);
    CHECK_THROWS_AS(GaussianBlur({4, 1.0}), Error);
    CHECK_THROWS_AS(GaussianBlur({5, 0.0}), Error);
}
