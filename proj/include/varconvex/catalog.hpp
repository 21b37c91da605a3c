#pragma once

#include <cmath>
#include <vector>

#include "varconvex/test_function.hpp"

namespace varconvex {

namespace detail {

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

inline std::vector<TestFunction> build_catalog() {
    std::vector<TestFunction> fns;

    {
        TestFunction f;
        f.name = "quadratic1d";  // 0.5 x^2
        f.dim = 1;
        f.eval = [](const Vec& x) { return ExtReal(0.5 * x[0] * x[0]); };
        f.analytic_subdiff = [](const Vec& x) { return SubdiffSet::single({x[0]}); };
        f.flags.convex = true;
        f.flags.known_prox_regular_at = {{{0.0}, {0.0}}};
        f.domain_lo = {-8.0};
        f.domain_hi = {8.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "abs";  // |x|
        f.dim = 1;
        f.eval = [](const Vec& x) { return ExtReal(std::abs(x[0])); };
        f.analytic_subdiff = [](const Vec& x) {
            if (x[0] == 0.0) return SubdiffSet::interval({-1.0}, {1.0});
            return SubdiffSet::single({sgn(x[0])});
        };
        f.flags.convex = true;
        f.flags.known_prox_regular_at = {{{0.0}, {0.0}}};
        f.domain_lo = {-8.0};
        f.domain_hi = {8.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "neg_quadratic";  // -0.5 x^2
        f.dim = 1;
        f.eval = [](const Vec& x) { return ExtReal(-0.5 * x[0] * x[0]); };
        f.analytic_subdiff = [](const Vec& x) { return SubdiffSet::single({-x[0]}); };
        f.flags.known_prox_regular_at = {{{0.0}, {0.0}}};
        f.domain_lo = {-8.0};
        f.domain_hi = {8.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "wshape";  // |x| - x^2: variationally convex at 0, not locally convex
        f.dim = 1;
        f.eval = [](const Vec& x) { return ExtReal(std::abs(x[0]) - x[0] * x[0]); };
        f.analytic_subdiff = [](const Vec& x) {
            if (x[0] == 0.0) return SubdiffSet::interval({-1.0}, {1.0});
            return SubdiffSet::single({sgn(x[0]) * (1.0 - 2.0 * std::abs(x[0]))});
        };
        f.flags.known_prox_regular_at = {{{0.0}, {0.0}}};
        f.domain_lo = {-8.0};
        f.domain_hi = {8.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "indicator_interval";  // delta_[-1,1]
        f.dim = 1;
        f.eval = [](const Vec& x) {
            return (x[0] >= -1.0 && x[0] <= 1.0) ? ExtReal(0.0) : ExtReal::infinity();
        };
        f.analytic_subdiff = [](const Vec& x) {
            if (x[0] < -1.0 || x[0] > 1.0) return SubdiffSet::empty();
            if (x[0] == 1.0) return SubdiffSet::interval({0.0}, {kInf});
            if (x[0] == -1.0) return SubdiffSet::interval({-kInf}, {0.0});
            return SubdiffSet::single({0.0});
        };
        f.flags.convex = true;
        f.flags.known_prox_regular_at = {{{1.0}, {0.0}}};
        f.domain_lo = {-2.0};
        f.domain_hi = {2.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "cubic";  // x^3: not prox-bounded, not variationally convex at 0
        f.dim = 1;
        f.eval = [](const Vec& x) { return ExtReal(x[0] * x[0] * x[0]); };
        f.analytic_subdiff = [](const Vec& x) {
            return SubdiffSet::single({3.0 * x[0] * x[0]});
        };
        f.domain_lo = {-8.0};
        f.domain_hi = {8.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "quad2d";  // 0.5 ||x||_2^2
        f.dim = 2;
        f.eval = [](const Vec& x) {
            return ExtReal(0.5 * (x[0] * x[0] + x[1] * x[1]));
        };
        f.analytic_subdiff = [](const Vec& x) { return SubdiffSet::single(x); };
        f.flags.convex = true;
        f.flags.known_prox_regular_at = {{{0.0, 0.0}, {0.0, 0.0}}};
        f.domain_lo = {-8.0, -8.0};
        f.domain_hi = {8.0, 8.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "saddle";  // x1^2 - x2^2
        f.dim = 2;
        f.eval = [](const Vec& x) {
            return ExtReal(x[0] * x[0] - x[1] * x[1]);
        };
        f.analytic_subdiff = [](const Vec& x) {
            return SubdiffSet::single({2.0 * x[0], -2.0 * x[1]});
        };
        f.flags.known_prox_regular_at = {{{0.0, 0.0}, {0.0, 0.0}}};
        f.domain_lo = {-8.0, -8.0};
        f.domain_hi = {8.0, 8.0};
        fns.push_back(f);
    }
    {
        TestFunction f;
        f.name = "min_two_quadratics";  // 0.5 min((x-1)^2, (x+1)^2): two prox branches
        f.dim = 1;
        f.eval = [](const Vec& x) {
            double a = x[0] - 1.0, b = x[0] + 1.0;
            return ExtReal(0.5 * std::min(a * a, b * b));
        };
        f.analytic_subdiff = [](const Vec& x) {
            if (x[0] > 0.0) return SubdiffSet::single({x[0] - 1.0});
            if (x[0] < 0.0) return SubdiffSet::single({x[0] + 1.0});
            return SubdiffSet::empty();  // downward kink: no regular subgradient
        };
        f.domain_lo = {-8.0};
        f.domain_hi = {8.0};
        fns.push_back(f);
    }
    return fns;
}

}  // namespace detail

inline const std::vector<TestFunction>& catalog() {
    static const std::vector<TestFunction> fns = detail::build_catalog();
    return fns;
}

inline const TestFunction& catalog_get(const std::string& name) {
    for (const auto& f : catalog())
        if (f.name == name) return f;
    throw UnknownFunction("unknown catalog function: " + name);
}

}  // namespace varconvex
