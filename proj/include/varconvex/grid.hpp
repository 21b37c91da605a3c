#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "varconvex/vec_util.hpp"

namespace varconvex {

struct GridTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Uniform tensor grid over [lo, hi], endpoints included.
struct Box {
    Vec lo;
    Vec hi;
    int points_per_axis = 3;

    Box() = default;
    Box(Vec lo_, Vec hi_, int ppa) : lo(std::move(lo_)), hi(std::move(hi_)), points_per_axis(ppa) {
        if (lo.size() != hi.size() || lo.empty())
            throw std::invalid_argument("Box: dimension mismatch");
        if (points_per_axis < 3)
            throw std::invalid_argument("Box: points_per_axis must be >= 3");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]))
                throw std::invalid_argument("Box: lo < hi required componentwise");
    }

    int dim() const { return static_cast<int>(lo.size()); }

    double spacing(int axis) const {
        return (hi[axis] - lo[axis]) / (points_per_axis - 1);
    }

    double max_spacing() const {
        double m = 0.0;
        for (int i = 0; i < dim(); ++i) m = std::max(m, spacing(i));
        return m;
    }

    std::uint64_t total_points() const {
        std::uint64_t n = 1;
        for (int i = 0; i < dim(); ++i) {
            n *= static_cast<std::uint64_t>(points_per_axis);
            if (n > (std::uint64_t{1} << 40)) return n;  // avoid overflow
        }
        return n;
    }

    bool contains(const Vec& x, double slack = 0.0) const {
        for (int i = 0; i < dim(); ++i)
            if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
        return true;
    }
};

inline constexpr std::uint64_t kDefaultGridCap = 10'000'000;

/// Visits every grid point in lexicographic order (axis 0 slowest) without
/// materializing the grid. The same point buffer is reused between calls.
inline void for_each_grid_point(const Box& box,
                                const std::function<void(const Vec&)>& fn,
                                std::uint64_t cap = kDefaultGridCap) {
    if (box.total_points() > cap)
        throw GridTooLarge("grid exceeds configured point cap");
    int n = box.dim();
    std::vector<int> idx(n, 0);
    Vec x(n);
    for (;;) {
        for (int i = 0; i < n; ++i)
            x[i] = (idx[i] == box.points_per_axis - 1)
                       ? box.hi[i]
                       : box.lo[i] + idx[i] * box.spacing(i);
        fn(x);
        int axis = n - 1;
        while (axis >= 0 && ++idx[axis] == box.points_per_axis) {
            idx[axis] = 0;
            --axis;
        }
        if (axis < 0) break;
    }
}

/// Full tensor grid, lexicographically ordered, endpoints included.
inline std::vector<Vec> grid_points(const Box& box,
                                    std::uint64_t cap = kDefaultGridCap) {
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(box.total_points()));
    for_each_grid_point(box, [&](const Vec& x) { pts.push_back(x); }, cap);
    return pts;
}

/// Axis-aligned box spanning the closed ball of the given radius (in the max
/// metric) around a center point.
inline Box ball_box(const Vec& center, double radius, int points_per_axis) {
    Vec lo(center.size()), hi(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
        lo[i] = center[i] - radius;
        hi[i] = center[i] + radius;
    }
    return Box(lo, hi, points_per_axis);
}

}  // namespace varconvex
