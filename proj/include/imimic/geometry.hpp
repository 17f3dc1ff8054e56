#ifndef IMIMIC_GEOMETRY_HPP
#define IMIMIC_GEOMETRY_HPP

#include <cmath>
#include <cstdint>

namespace imimic {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

// Integer pixel coordinate, image convention: x = column, y = row (y grows down).
struct Pix {
    int x = 0;
    int y = 0;

    bool operator==(const Pix&) const = default;

    Vec2 to_vec() const { return {double(x), double(y)}; }
};

// (y, x) lexicographic order; used for deterministic tie-breaks.
inline bool yx_less(Pix a, Pix b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

// Wrap into (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double pi = 3.14159265358979323846;
    constexpr double two_pi = 2.0 * pi;
    a = std::fmod(a, two_pi);
    if (a <= -pi) a += two_pi;
    if (a > pi) a -= two_pi;
    return a;
}

}  // namespace imimic

#endif
