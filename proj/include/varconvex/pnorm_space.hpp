#pragma once

#include <cmath>
#include <stdexcept>

#include "varconvex/vec_util.hpp"

namespace varconvex {

/// Finite-dimensional R^n equipped with a p-norm, 1 < p < inf. The conjugate
/// exponent q satisfies 1/p + 1/q = 1; the dual space carries the q-norm.
struct PNormSpace {
    int dim = 1;
    double p = 2.0;
    double q = 2.0;
};

inline PNormSpace make_pnorm_space(int dim, double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("PNormSpace: p must lie in (1, inf)");
    if (dim < 1) throw std::invalid_argument("PNormSpace: dim must be >= 1");
    PNormSpace s;
    s.dim = dim;
    s.p = p;
    s.q = p / (p - 1.0);
    return s;
}

inline double pnorm(double p, const Vec& x) {
    if (p == 2.0) return norm2(x);
    double s = 0.0;
    for (double xi : x) s += std::pow(std::abs(xi), p);
    return std::pow(s, 1.0 / p);
}

inline double norm(const PNormSpace& space, const Vec& x) {
    return pnorm(space.p, x);
}

inline double dual_norm(const PNormSpace& space, const Vec& xstar) {
    return pnorm(space.q, xstar);
}

/// Duality mapping J(x)_i = ||x||_p^{2-p} |x_i|^{p-1} sign(x_i), the gradient
/// of 0.5||.||_p^2. Satisfies <J(x),x> = ||x||_p^2 and ||J(x)||_q = ||x||_p.
inline Vec duality_map(const PNormSpace& space, const Vec& x) {
    Vec r(x.size(), 0.0);
    if (space.p == 2.0) return x;
    double nx = pnorm(space.p, x);
    if (nx == 0.0) return r;
    double c = std::pow(nx, 2.0 - space.p);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = std::abs(x[i]);
        if (a == 0.0) continue;
        r[i] = c * std::pow(a, space.p - 1.0) * (x[i] > 0 ? 1.0 : -1.0);
    }
    return r;
}

/// Inverse of the duality mapping: the duality map of the dual (q-norm) space.
inline Vec duality_map_inverse(const PNormSpace& space, const Vec& xstar) {
    PNormSpace dual;
    dual.dim = space.dim;
    dual.p = space.q;
    dual.q = space.p;
    return duality_map(dual, xstar);
}

}  // namespace varconvex
