// Small geometric helpers for points, balls and axis-aligned boxes.
#pragma once

#include <array>
#include <cmath>

namespace parawolff {

// Spatial point; the second coordinate is ignored when n == 1.
using Point = std::array<double, 2>;

inline double dist(const Point& a, const Point& b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Distance from a point to an axis-aligned box [lo, hi]; 0 inside.
inline double dist_point_box(const Point& c, const Point& lo, const Point& hi, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = 0.0;
        if (c[i] < lo[i]) d = lo[i] - c[i];
        else if (c[i] > hi[i]) d = c[i] - hi[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Distance from a point to the farthest point of the box.
inline double max_dist_point_box(const Point& c, const Point& lo, const Point& hi, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::max(std::abs(c[i] - lo[i]), std::abs(c[i] - hi[i]));
        s += d * d;
    }
    return std::sqrt(s);
}

// Cubic smoothstep, clamped to [0, 1].
inline double smoothstep(double w) {
    if (w <= 0.0) return 0.0;
    if (w >= 1.0) return 1.0;
    return w * w * (3.0 - 2.0 * w);
}

}  // namespace parawolff
