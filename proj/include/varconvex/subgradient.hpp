#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "varconvex/certificate.hpp"
#include "varconvex/grid.hpp"
#include "varconvex/pnorm_space.hpp"
#include "varconvex/test_function.hpp"

namespace varconvex {

struct EmptySample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double default_membership_tol(const Vec& xstar) {
    return 1e-6 * (1.0 + pnorm(2.0, xstar));
}

struct MembershipResult {
    bool passes = false;
    Vec witness;           // violating probe point if !passes
    double min_quotient = 0.0;
    double grid_spacing = 0.0;
    double tol = 0.0;
};

/// Difference quotient of the subgradient inequality at a single probe.
inline double subgradient_quotient(const TestFunction& f, const PNormSpace& space,
                                   const Vec& x, const Vec& xstar, double fx,
                                   const Vec& probe) {
    ExtReal fp = f.eval(probe);
    if (!fp.finite()) return kInf;
    Vec d = sub(probe, x);
    return (fp.value() - fx - dot(xstar, d)) / norm(space, d);
}

/// Resolution-limited necessary test for x* being an eps-subgradient of f at
/// x: the difference quotient must stay above -(eps + tol) at every grid
/// probe in the ball. A pass is evidence at this resolution, not a proof.
inline MembershipResult is_regular_subgradient(
    const TestFunction& f, const PNormSpace& space, const Vec& x,
    const Vec& xstar, double eps, double probe_radius, const Box& grid,
    double tol = -1.0) {
    ExtReal fx = f.eval(x);
    if (!fx.finite())
        throw NonFiniteValue("is_regular_subgradient: f(x) must be finite");
    if (probe_radius <= 0)
        throw std::invalid_argument("is_regular_subgradient: probe_radius > 0");
    if (tol < 0) tol = default_membership_tol(xstar);

    MembershipResult res;
    res.passes = true;
    res.min_quotient = kInf;
    res.grid_spacing = grid.max_spacing();
    res.tol = tol;
    double threshold = -(eps + tol);
    for_each_grid_point(grid, [&](const Vec& probe) {
        double dist = norm(space, sub(probe, x));
        if (dist == 0.0 || dist > probe_radius) return;
        double q = subgradient_quotient(f, space, x, xstar, fx.value(), probe);
        if (q < res.min_quotient) res.min_quotient = q;
        if (q < threshold && res.passes) {
            res.passes = false;
            res.witness = probe;
        }
    });
    return res;
}

struct GraphEntry {
    Vec x;
    Vec xstar;
    double fx = 0.0;
};

inline bool entry_lex_less(const GraphEntry& a, const GraphEntry& b) {
    return lex_less_pair(a.x, a.xstar, b.x, b.xstar);
}

enum class Provenance { Analytic, Numeric };

/// Finite approximation of gph(subdifferential) restricted to a window.
struct GraphSample {
    std::vector<GraphEntry> entries;
    Provenance provenance = Provenance::Numeric;
    json params = json::object();
};

struct SampleOptions {
    double probe_radius = 0.0;   // 0: 3x primal spacing
    double membership_tol = -1;  // <0: default per entry
    double analytic_set_tol = 1e-12;
};

inline bool in_window_primal(const PNormSpace& space, const AttentiveWindow& w,
                             const Vec& x) {
    return norm(space, sub(x, w.center_x)) < w.radius_x;
}

inline bool in_window_dual(const PNormSpace& space, const AttentiveWindow& w,
                           const Vec& xstar) {
    return dual_norm(space, sub(xstar, w.center_xstar)) < w.radius_dual;
}

inline bool attentive_value(const AttentiveWindow& w, double fx) {
    return fx < w.f_center + w.eps_value;
}

/// Samples gph(subdifferential) over the window. Analytic descriptions are
/// used when the function carries one; otherwise every grid pair passing the
/// regular-subgradient test at eps = 0 is kept.
inline GraphSample sample_graph(const TestFunction& f, const PNormSpace& space,
                                const AttentiveWindow& window,
                                const Box& primal_grid, const Box& dual_grid,
                                SampleOptions opts = {}) {
    double probe_radius = opts.probe_radius > 0 ? opts.probe_radius
                                                : 3.0 * primal_grid.max_spacing();
    GraphSample sample;
    sample.provenance =
        f.analytic_subdiff ? Provenance::Analytic : Provenance::Numeric;

    std::vector<Vec> dual_pts;
    for_each_grid_point(dual_grid, [&](const Vec& v) {
        if (in_window_dual(space, window, v)) dual_pts.push_back(v);
    });

    auto push_entry = [&](const Vec& x, const Vec& v, double fx) {
        for (const auto& e : sample.entries)
            if (dist_inf(e.x, x) < 1e-13 && dist_inf(e.xstar, v) < 1e-13) return;
        sample.entries.push_back({x, v, fx});
    };

    for_each_grid_point(primal_grid, [&](const Vec& x) {
        if (!in_window_primal(space, window, x)) return;
        ExtReal fx = f.eval(x);
        if (!fx.finite() || !attentive_value(window, fx.value())) return;
        if (sample.provenance == Provenance::Analytic) {
            SubdiffSet set = (*f.analytic_subdiff)(x);
            for (const auto& p : set.points)
                if (in_window_dual(space, window, p))
                    push_entry(x, p, fx.value());
            if (set.box) {
                for (const auto& v : dual_pts)
                    if (set.contains(v, opts.analytic_set_tol))
                        push_entry(x, v, fx.value());
            }
        } else {
            for (const auto& v : dual_pts) {
                auto r = is_regular_subgradient(f, space, x, v, 0.0,
                                                probe_radius, primal_grid,
                                                opts.membership_tol);
                if (r.passes) push_entry(x, v, fx.value());
            }
        }
    });

    if (sample.entries.empty())
        throw EmptySample("sample_graph: window misses the subgradient graph");
    std::sort(sample.entries.begin(), sample.entries.end(), entry_lex_less);
    sample.params["primal_box"] = {{"lo", primal_grid.lo},
                                   {"hi", primal_grid.hi},
                                   {"points_per_axis", primal_grid.points_per_axis}};
    sample.params["dual_box"] = {{"lo", dual_grid.lo},
                                 {"hi", dual_grid.hi},
                                 {"points_per_axis", dual_grid.points_per_axis}};
    sample.params["probe_radius"] = probe_radius;
    sample.params["membership_tol"] =
        opts.membership_tol < 0 ? json("per-entry default") : json(opts.membership_tol);
    sample.params["radius_x"] = window.radius_x;
    sample.params["radius_dual"] = window.radius_dual;
    sample.params["eps_value"] = window.eps_value;
    return sample;
}

/// Keeps exactly the entries inside the window; idempotent, and shrinking any
/// radius yields a subset.
inline GraphSample attentive_filter(const GraphSample& sample,
                                    const PNormSpace& space,
                                    const AttentiveWindow& window) {
    GraphSample out;
    out.provenance = sample.provenance;
    out.params = sample.params;
    for (const auto& e : sample.entries)
        if (in_window_primal(space, window, e.x) &&
            in_window_dual(space, window, e.xstar) &&
            attentive_value(window, e.fx))
            out.entries.push_back(e);
    return out;
}

/// Graph-closure surrogate for the limiting subdifferential: clusters entries
/// at grid resolution and appends cluster centroids not already represented.
/// On lower-regular functions this is a no-op.
inline GraphSample close_graph(const GraphSample& sample, double resolution_x,
                               double resolution_dual) {
    GraphSample out = sample;
    std::vector<GraphEntry> sorted = sample.entries;
    std::sort(sorted.begin(), sorted.end(), entry_lex_less);
    std::vector<bool> used(sorted.size(), false);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (used[i]) continue;
        Vec cx = sorted[i].x, cs = sorted[i].xstar;
        double cf = sorted[i].fx;
        int count = 1;
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            if (used[j]) continue;
            if (dist_inf(sorted[i].x, sorted[j].x) <= resolution_x &&
                dist_inf(sorted[i].xstar, sorted[j].xstar) <= resolution_dual) {
                used[j] = true;
                cx = add(cx, sorted[j].x);
                cs = add(cs, sorted[j].xstar);
                cf += sorted[j].fx;
                ++count;
            }
        }
        GraphEntry centroid{scale(1.0 / count, cx), scale(1.0 / count, cs),
                            cf / count};
        bool represented = false;
        for (const auto& e : sample.entries)
            if (dist_inf(e.x, centroid.x) <= resolution_x &&
                dist_inf(e.xstar, centroid.xstar) <= resolution_dual) {
                represented = true;
                break;
            }
        if (!represented) out.entries.push_back(centroid);
    }
    std::sort(out.entries.begin(), out.entries.end(), entry_lex_less);
    return out;
}

/// Doubling search for prox-regularity parameters: the smallest r in
/// {1,2,...,64} together with the largest eps >= 1e-2 for which the localized
/// lower-quadratic subgradient inequality holds on the sampled window.
inline std::optional<std::pair<double, double>> find_prox_regularity(
    const TestFunction& f, const PNormSpace& space, const Vec& xbar,
    const Vec& xbarstar, const GraphSample& sample, const Box& grid,
    double tol = 1e-9) {
    ExtReal fc = f.eval(xbar);
    if (!fc.finite()) throw NonFiniteValue("find_prox_regularity: f(xbar) infinite");
    for (double r = 1.0; r <= 64.0; r *= 2.0) {
        for (double eps = 0.25; eps >= 1e-2; eps *= 0.5) {
            bool ok = true;
            for (const auto& e : sample.entries) {
                if (!ok) break;
                if (norm(space, sub(e.x, xbar)) >= eps) continue;
                if (dual_norm(space, sub(e.xstar, xbarstar)) >= eps) continue;
                if (e.fx >= fc.value() + eps) continue;
                for_each_grid_point(grid, [&](const Vec& x) {
                    if (!ok) return;
                    if (norm(space, sub(x, xbar)) >= eps) return;
                    ExtReal fx = f.eval(x);
                    if (!fx.finite()) return;
                    double dist = norm(space, sub(x, e.x));
                    double rhs = e.fx + dot(e.xstar, sub(x, e.x)) -
                                 0.5 * r * dist * dist;
                    if (fx.value() < rhs - tol) ok = false;
                });
            }
            if (ok) return std::make_pair(r, eps);
        }
    }
    return std::nullopt;
}

}  // namespace varconvex
