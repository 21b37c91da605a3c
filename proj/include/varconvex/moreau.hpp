#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "varconvex/certificate.hpp"
#include "varconvex/grid.hpp"
#include "varconvex/pnorm_space.hpp"
#include "varconvex/subgradient.hpp"
#include "varconvex/test_function.hpp"

namespace varconvex {

struct LambdaNonPositive : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Result of one (possibly tilted) envelope evaluation. Unbounded means the
/// box-doubling divergence heuristic fired; minimizers are then empty.
struct EnvelopeResult {
    bool unbounded = false;
    ExtReal value = ExtReal::infinity();
    std::vector<Vec> minimizers;
    double lambda = 0.0;
    Vec tilt;
    int doublings = 0;
    bool boundary_skip = false;  // refinement skipped at an indicator boundary
    bool boundary_after_max_doublings = false;

    bool finite() const { return !unbounded && value.finite(); }
};

struct EnvelopeOptions {
    double refine_step = 1e-9;
    double divergence_factor = 10.0;
    int max_doublings = 6;
    double seed_rel_tol = 1e-7;   // grid cells within this of the best seed refinement
    double dedupe_tol = 1e-5;
    int max_sweeps = 24;
};

namespace detail {

inline ExtReal envelope_objective(const TestFunction& f, const PNormSpace& space,
                                  double lambda, const Vec& x, const Vec& tilt,
                                  const Vec& w) {
    ExtReal fw = f.eval(w);
    if (!fw.finite()) return fw;
    double quad = norm(space, sub(w, x));
    return ExtReal(fw.value() - dot(tilt, w) + quad * quad / (2.0 * lambda));
}

struct ScanResult {
    ExtReal best = ExtReal::infinity();
    std::vector<Vec> best_cells;
    bool best_on_boundary = false;
};

inline ScanResult scan_box(const TestFunction& f, const PNormSpace& space,
                           double lambda, const Vec& x, const Vec& tilt,
                           const Box& box, double seed_rel_tol) {
    ScanResult r;
    // pass 1: best value
    for_each_grid_point(box, [&](const Vec& w) {
        ExtReal v = envelope_objective(f, space, lambda, x, tilt, w);
        if (v < r.best) r.best = v;
    });
    if (!r.best.finite()) return r;
    double keep = r.best.value() + seed_rel_tol * (1.0 + std::abs(r.best.value()));
    for_each_grid_point(box, [&](const Vec& w) {
        ExtReal v = envelope_objective(f, space, lambda, x, tilt, w);
        if (v.finite() && v.value() <= keep) r.best_cells.push_back(w);
    });
    double half = box.max_spacing() * 0.5;
    for (const auto& w : r.best_cells) {
        for (int i = 0; i < box.dim(); ++i)
            if (w[i] <= box.lo[i] + half || w[i] >= box.hi[i] - half)
                r.best_on_boundary = true;
    }
    return r;
}

}  // namespace detail

/// Tilted Moreau envelope at one point: full grid scan over the search box,
/// box doubling while the best cell sits on the boundary (with the divergence
/// heuristic), then coordinate-wise ternary refinement of every near-optimal
/// cell. Minimizers are deduplicated and sorted.
inline EnvelopeResult envelope(const TestFunction& f, const PNormSpace& space,
                               double lambda, const Vec& x, const Vec& tilt,
                               const Box& search, EnvelopeOptions opts = {}) {
    if (!(lambda > 0)) throw LambdaNonPositive("envelope: lambda must be > 0");
    if (!search.contains(x, 1e-12))
        throw std::invalid_argument("envelope: search box must contain x");

    EnvelopeResult res;
    res.lambda = lambda;
    res.tilt = tilt;

    Box box = search;
    auto scan = detail::scan_box(f, space, lambda, x, tilt, box, opts.seed_rel_tol);
    std::optional<double> first_boundary_best;
    while (scan.best.finite() && scan.best_on_boundary &&
           res.doublings < opts.max_doublings) {
        if (!first_boundary_best) first_boundary_best = scan.best.value();
        Vec c(box.lo.size()), lo(box.lo.size()), hi(box.lo.size());
        for (std::size_t i = 0; i < box.lo.size(); ++i) {
            c[i] = 0.5 * (box.lo[i] + box.hi[i]);
            lo[i] = c[i] - 2.0 * (c[i] - box.lo[i]);
            hi[i] = c[i] + 2.0 * (box.hi[i] - c[i]);
        }
        box = Box(lo, hi, box.points_per_axis);
        ++res.doublings;
        scan = detail::scan_box(f, space, lambda, x, tilt, box, opts.seed_rel_tol);
        if (scan.best.finite() &&
            scan.best.value() < *first_boundary_best -
                                    opts.divergence_factor *
                                        std::max(1.0, std::abs(*first_boundary_best))) {
            res.unbounded = true;
            return res;
        }
    }
    if (scan.best.finite() && scan.best_on_boundary)
        res.boundary_after_max_doublings = true;

    if (!scan.best.finite())
        throw std::invalid_argument(
            "envelope: search box does not meet the effective domain");

    // refinement
    auto objective = [&](const Vec& w) {
        return detail::envelope_objective(f, space, lambda, x, tilt, w);
    };
    std::vector<Vec> refined;
    for (const auto& seed : scan.best_cells) {
        Vec w = seed;
        double delta = 1e-7 * (1.0 + box.max_spacing());
        // domain-boundary detection for indicator-like functions
        std::vector<bool> skip(w.size(), false);
        for (std::size_t i = 0; i < w.size(); ++i) {
            Vec probe = w;
            probe[i] = w[i] + delta;
            bool inf_right = !f.eval(probe).finite();
            probe[i] = w[i] - delta;
            bool inf_left = !f.eval(probe).finite();
            if (f.eval(w).finite() && (inf_right || inf_left)) {
                skip[i] = true;
                res.boundary_skip = true;
            }
        }
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            double moved = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (skip[i]) continue;
                double h = box.spacing(static_cast<int>(i));
                double a = w[i] - h, b = w[i] + h;
                Vec probe = w;
                while (b - a > opts.refine_step) {
                    double m1 = a + (b - a) / 3.0;
                    double m2 = b - (b - a) / 3.0;
                    probe[i] = m1;
                    ExtReal v1 = objective(probe);
                    probe[i] = m2;
                    ExtReal v2 = objective(probe);
                    if (v1 <= v2)
                        b = m2;
                    else
                        a = m1;
                }
                double t = 0.5 * (a + b);
                probe[i] = t;
                if (objective(probe) <= objective(w)) {
                    moved = std::max(moved, std::abs(t - w[i]));
                    w[i] = t;
                }
            }
            if (moved < opts.refine_step) break;
        }
        refined.push_back(w);
    }

    ExtReal best = ExtReal::infinity();
    for (const auto& w : refined) best = ext_min(best, objective(w));
    res.value = best;
    double keep = best.value() + opts.seed_rel_tol * (1.0 + std::abs(best.value()));
    std::vector<Vec> kept;
    for (const auto& w : refined) {
        ExtReal v = objective(w);
        if (!v.finite() || v.value() > keep) continue;
        bool dup = false;
        for (const auto& m : kept)
            if (dist_inf(m, w) <= opts.dedupe_tol) dup = true;
        if (!dup) kept.push_back(w);
    }
    std::sort(kept.begin(), kept.end(), lex_less);
    res.minimizers = std::move(kept);
    return res;
}

/// Proximal mapping: the minimizer set of the envelope objective.
inline std::vector<Vec> prox(const TestFunction& f, const PNormSpace& space,
                             double lambda, const Vec& x, const Vec& tilt,
                             const Box& search, EnvelopeOptions opts = {}) {
    return envelope(f, space, lambda, x, tilt, search, opts).minimizers;
}

/// Checks the Hilbert-space relation between the tilted envelope at xbar and
/// the plain envelope at xbar + lambda*xbarstar (values and prox sets).
inline Certificate tilt_relation_check(const TestFunction& f,
                                       const PNormSpace& space, double lambda,
                                       const Vec& xbar, const Vec& xbarstar,
                                       const Box& search,
                                       double tol = 1e-8) {
    if (space.p != 2.0)
        throw std::invalid_argument("tilt_relation_check: requires p = 2");
    Certificate cert;
    cert.criterion = "tilt_relation";
    Vec shifted = axpy(lambda, xbarstar, xbar);
    Vec zero(xbar.size(), 0.0);
    EnvelopeResult lhs = envelope(f, space, lambda, xbar, xbarstar, search);
    EnvelopeResult rhs = envelope(f, space, lambda, shifted, zero, search);
    if (lhs.unbounded || rhs.unbounded) {
        cert.verdict = Verdict::Inconclusive;
        cert.notes.push_back("envelope unbounded on at least one side");
        cert.params["lhs_unbounded"] = lhs.unbounded;
        cert.params["rhs_unbounded"] = rhs.unbounded;
        return cert;
    }
    double offset = dot(xbarstar, xbar) + 0.5 * lambda * dot(xbarstar, xbarstar);
    double rhs_value = rhs.value.value() - offset;
    double gap = lhs.value.value() - rhs_value;
    cert.params["lambda"] = lambda;
    cert.params["value_gap"] = gap;
    double set_tol = 1e-6;
    double hausdorff = 0.0;
    if (lhs.minimizers.size() != rhs.minimizers.size()) hausdorff = kInf;
    for (const auto& m : lhs.minimizers) {
        double d = kInf;
        for (const auto& n : rhs.minimizers) d = std::min(d, dist_inf(m, n));
        hausdorff = std::max(hausdorff, d);
    }
    cert.params["prox_set_gap"] = hausdorff;
    if (std::abs(gap) <= tol * (1.0 + std::abs(lhs.value.value())) &&
        hausdorff <= set_tol) {
        cert.verdict = Verdict::Holds;
    } else {
        cert.verdict = Verdict::FailsWithWitness;
        cert.witness = {{"xbar", xbar},
                        {"xbarstar", xbarstar},
                        {"lambda", lambda},
                        {"value_gap", gap},
                        {"prox_set_gap", hausdorff}};
    }
    return cert;
}

/// Prox-boundedness threshold report: the bracket around lambda0 observed on
/// a lambda ladder and probe set.
struct ProxBoundReport {
    double lambda_zero_lower = 0.0;
    double lambda_zero_upper = kInf;
    // (lambda, probe index) -> finite value or "unbounded"
    json witnesses = json::array();
};

inline ProxBoundReport prox_bound_threshold(const TestFunction& f,
                                            const PNormSpace& space,
                                            const std::vector<double>& lambda_grid,
                                            const std::vector<Vec>& probes,
                                            const Box& search) {
    ProxBoundReport report;
    std::vector<bool> all_finite(lambda_grid.size(), true);
    std::vector<bool> any_finite(lambda_grid.size(), false);
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (i > 0 && lambda_grid[i] <= lambda_grid[i - 1])
            throw std::invalid_argument("prox_bound_threshold: grid must ascend");
        for (std::size_t j = 0; j < probes.size(); ++j) {
            EnvelopeResult r = envelope(f, space, lambda_grid[i], probes[j], Vec(probes[j].size(), 0.0), search);
            bool fin = r.finite();
            all_finite[i] = all_finite[i] && fin;
            any_finite[i] = any_finite[i] || fin;
            json w;
            w["lambda"] = lambda_grid[i];
            w["x"] = probes[j];
            if (fin)
                w["value"] = r.value.value();
            else
                w["value"] = "unbounded";
            report.witnesses.push_back(w);
        }
    }
    // Trichotomy: a finite probe at lambda forces all probes finite below it.
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!any_finite[i]) continue;
        for (std::size_t j = 0; j < i; ++j)
            if (!all_finite[j])
                throw std::logic_error(
                    "prox_bound_threshold: divergence heuristic violated the "
                    "all-or-nothing structure");
    }
    report.lambda_zero_lower = 0.0;
    report.lambda_zero_upper = kInf;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (all_finite[i]) report.lambda_zero_lower = lambda_grid[i];
        if (!all_finite[i] && report.lambda_zero_upper == kInf)
            report.lambda_zero_upper = lambda_grid[i];
    }
    return report;
}

/// Proximal-subgradient inequality on a grid ball around xbar.
inline Certificate proximal_subgradient_check(const TestFunction& f,
                                              const PNormSpace& space,
                                              const Vec& xbar, const Vec& xbarstar,
                                              double r, double radius,
                                              const Box& grid, double tol = 1e-9) {
    ExtReal fc = f.eval(xbar);
    if (!fc.finite())
        throw NonFiniteValue("proximal_subgradient_check: f(xbar) infinite");
    Certificate cert;
    cert.criterion = "proximal_subgradient";
    cert.params["r"] = r;
    cert.params["radius"] = radius;
    cert.verdict = Verdict::Holds;
    for_each_grid_point(grid, [&](const Vec& x) {
        if (cert.verdict != Verdict::Holds) return;
        double dist = norm(space, sub(x, xbar));
        if (dist == 0.0 || dist > radius) return;
        ExtReal fx = f.eval(x);
        if (!fx.finite()) return;
        double rhs = fc.value() + dot(xbarstar, sub(x, xbar)) - 0.5 * r * dist * dist;
        if (fx.value() < rhs - tol) {
            cert.verdict = Verdict::FailsWithWitness;
            cert.witness = {{"x", x}, {"violation", fx.value() - rhs}};
        }
    });
    return cert;
}

/// Prox fixed-point test: P^{xbarstar}_lambda f(xbar) = {xbar} per lambda,
/// with the cross-check that a pass propagates to every smaller lambda.
inline Certificate prox_fixed_point_check(const TestFunction& f,
                                          const PNormSpace& space,
                                          const Vec& xbar, const Vec& xbarstar,
                                          std::vector<double> lambda_list,
                                          const Box& search,
                                          double point_tol = 1e-5) {
    ExtReal fc = f.eval(xbar);
    if (!fc.finite())
        throw NonFiniteValue("prox_fixed_point_check: f(xbar) infinite");
    Certificate cert;
    cert.criterion = "prox_fixed_point";
    std::sort(lambda_list.begin(), lambda_list.end());
    std::vector<bool> holds(lambda_list.size(), false);
    json rows = json::array();
    for (std::size_t i = 0; i < lambda_list.size(); ++i) {
        EnvelopeResult r = envelope(f, space, lambda_list[i], xbar, xbarstar, search);
        bool ok = !r.unbounded && r.minimizers.size() == 1 &&
                  dist_inf(r.minimizers[0], xbar) <= point_tol;
        holds[i] = ok;
        json row;
        row["lambda"] = lambda_list[i];
        row["holds"] = ok;
        row["unbounded"] = r.unbounded;
        row["minimizers"] = r.minimizers;
        rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < lambda_list.size(); ++i)
        if (holds[i + 1] && !holds[i])
            throw std::logic_error(
                "prox_fixed_point_check: pass at a lambda must propagate to "
                "smaller lambdas");
    cert.params["per_lambda"] = rows;
    bool all = true;
    for (bool h : holds) all = all && h;
    if (all) {
        cert.verdict = Verdict::Holds;
    } else {
        cert.verdict = Verdict::FailsWithWitness;
        for (std::size_t i = 0; i < lambda_list.size(); ++i)
            if (!holds[i]) {
                cert.witness = rows[i];
                break;
            }
    }
    return cert;
}

/// Central-difference check of the envelope gradient formula
/// grad e = (1/lambda) J(x - P(x)). Inconclusive when the prox is not
/// single-valued at the stencil.
inline Certificate envelope_gradient_check(const TestFunction& f,
                                           const PNormSpace& space,
                                           double lambda, const Vec& x,
                                           const Vec& tilt, const Box& search,
                                           double fd_step = -1.0) {
    if (fd_step <= 0) fd_step = 1e-5 * (1.0 + norm2(x));
    Certificate cert;
    cert.criterion = "envelope_gradient_formula";
    cert.params["lambda"] = lambda;
    cert.params["fd_step"] = fd_step;
    EnvelopeResult at_x = envelope(f, space, lambda, x, tilt, search);
    if (at_x.unbounded || at_x.minimizers.size() != 1)
        return Certificate::inconclusive("envelope_gradient_formula",
                                         "prox not single-valued at x");
    Vec formula = duality_map(space, sub(x, at_x.minimizers[0]));
    formula = scale(1.0 / lambda, formula);
    double tol = std::max(1e-4, 10.0 * fd_step);
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += fd_step;
        xm[i] -= fd_step;
        EnvelopeResult ep = envelope(f, space, lambda, xp, tilt, search);
        EnvelopeResult em = envelope(f, space, lambda, xm, tilt, search);
        if (ep.unbounded || em.unbounded || ep.minimizers.size() != 1 ||
            em.minimizers.size() != 1)
            return Certificate::inconclusive("envelope_gradient_formula",
                                             "prox not single-valued at stencil");
        double fd = (ep.value.value() - em.value.value()) / (2.0 * fd_step);
        if (std::abs(fd - formula[i]) > tol) {
            cert.verdict = Verdict::FailsWithWitness;
            cert.witness = {{"coordinate", i},
                            {"finite_difference", fd},
                            {"formula", formula[i]},
                            {"x", x}};
            return cert;
        }
    }
    cert.verdict = Verdict::Holds;
    cert.params["formula_gradient"] = formula;
    return cert;
}

}  // namespace varconvex
