#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <vector>

#include "varconvex/catalog.hpp"
#include "varconvex/certificate.hpp"
#include "varconvex/grid.hpp"
#include "varconvex/moreau.hpp"
#include "varconvex/pnorm_space.hpp"
#include "varconvex/subgradient.hpp"

namespace varconvex {

/// Uniform certifier tolerance: 1e-7 * (1 + scale), scale = largest |phi|
/// seen over the window.
inline double certifier_tol(double scale) { return 1e-7 * (1.0 + scale); }

namespace detail {

struct WindowGrid {
    std::vector<Vec> points;       // primal grid points inside the window ball
    std::vector<double> values;    // phi, +inf allowed (raw)
    double scale = 0.0;            // max finite |phi|
};

inline WindowGrid collect_window_grid(const TestFunction& f,
                                      const PNormSpace& space,
                                      const AttentiveWindow& w, const Box& grid) {
    WindowGrid out;
    for_each_grid_point(grid, [&](const Vec& x) {
        if (!in_window_primal(space, w, x)) return;
        ExtReal fx = f.eval(x);
        out.points.push_back(x);
        out.values.push_back(fx.raw());
        if (fx.finite()) out.scale = std::max(out.scale, std::abs(fx.value()));
    });
    return out;
}

}  // namespace detail

/// Single-inequality helpers shared with witness replay.
inline double subgradient_gap(const TestFunction& f, const Vec& u,
                              const Vec& ustar, double fu, const Vec& x) {
    ExtReal fx = f.eval(x);
    if (!fx.finite()) return kInf;
    return fx.value() - fu - dot(ustar, sub(x, u));
}

inline double monotone_product(const GraphEntry& a, const GraphEntry& b) {
    return dot(sub(a.xstar, b.xstar), sub(a.x, b.x));
}

/// Localized subgradient inequality: every attentive sample pair must
/// minorize phi on the whole primal window.
inline Certificate certify_subgradient_inequality(const TestFunction& f,
                                                  const PNormSpace& space,
                                                  const AttentiveWindow& window,
                                                  const GraphSample& sample,
                                                  const Box& grid) {
    GraphSample s = attentive_filter(sample, space, window);
    if (s.entries.empty())
        throw EmptySample("certify_subgradient_inequality: empty attentive sample");
    auto wg = detail::collect_window_grid(f, space, window, grid);
    double tol = certifier_tol(wg.scale);

    Certificate cert;
    cert.criterion = "subgradient_inequality";
    cert.window = window;
    cert.params["tol"] = tol;
    cert.params["entries"] = s.entries.size();
    cert.verdict = Verdict::Holds;
    for (const auto& e : s.entries) {
        for (const auto& x : wg.points) {
            double gap = subgradient_gap(f, e.x, e.xstar, e.fx, x);
            if (gap < -tol) {
                cert.verdict = Verdict::FailsWithWitness;
                cert.witness = {{"u", e.x},
                                {"ustar", e.xstar},
                                {"fu", e.fx},
                                {"x", x},
                                {"gap", gap}};
                return cert;
            }
        }
    }
    return cert;
}

/// Pointwise supremum of the affine minorants carried by the sample; convex
/// by construction and finite everywhere once the sample is nonempty.
inline TestFunction build_affine_envelope(const TestFunction& f,
                                          const AttentiveWindow& window,
                                          const GraphSample& sample) {
    if (sample.entries.empty())
        throw EmptySample("build_affine_envelope: empty sample");
    auto entries = sample.entries;
    TestFunction hat;
    hat.name = f.name + "_affine_envelope";
    hat.dim = f.dim;
    hat.flags.convex = true;
    hat.domain_lo = f.domain_lo;
    hat.domain_hi = f.domain_hi;
    hat.eval = [entries](const Vec& x) {
        double best = -kInf;
        for (const auto& e : entries)
            best = std::max(best, e.fx + dot(e.xstar, sub(x, e.x)));
        return ExtReal(best);
    };
    return hat;
}

/// Variational-convexity certificate via the affine envelope: the attentive
/// sample must coincide with the envelope's subgradient graph on the window,
/// with equal function values at common points, in both directions.
inline Certificate certify_variational_convexity_def(
    const TestFunction& f, const PNormSpace& space,
    const AttentiveWindow& window, const GraphSample& sample, const Box& grid,
    const Box& dual_grid) {
    GraphSample s = attentive_filter(sample, space, window);
    if (s.entries.empty())
        throw EmptySample("certify_variational_convexity_def: empty sample");
    TestFunction hat = build_affine_envelope(f, window, s);
    auto wg = detail::collect_window_grid(f, space, window, grid);
    double tol = certifier_tol(wg.scale);
    double probe_radius = 3.0 * grid.max_spacing();

    Certificate cert;
    cert.criterion = "vc_definition";
    cert.window = window;
    cert.params["tol"] = tol;
    cert.params["entries"] = s.entries.size();
    cert.verdict = Verdict::Holds;

    std::vector<double> hat_values(wg.points.size());
    for (std::size_t i = 0; i < wg.points.size(); ++i)
        hat_values[i] = hat.eval(wg.points[i]).value();

    auto hat_subgradient_ok = [&](const Vec& x, double hat_x, const Vec& v) {
        for (std::size_t i = 0; i < wg.points.size(); ++i) {
            double lhs = hat_values[i];
            double rhs = hat_x + dot(v, sub(wg.points[i], x));
            if (lhs < rhs - tol) return false;
        }
        return true;
    };

    // (a) sampled graph -> envelope graph with matching values
    for (const auto& e : s.entries) {
        double hat_e = hat.eval(e.x).value();
        if (std::abs(hat_e - e.fx) > tol) {
            cert.verdict = Verdict::FailsWithWitness;
            cert.witness = {{"direction", "sample_to_envelope"},
                            {"x", e.x},
                            {"xstar", e.xstar},
                            {"phi", e.fx},
                            {"envelope", hat_e},
                            {"gap", hat_e - e.fx}};
            return cert;
        }
        if (!hat_subgradient_ok(e.x, hat_e, e.xstar)) {
            cert.verdict = Verdict::FailsWithWitness;
            cert.witness = {{"direction", "sample_to_envelope"},
                            {"x", e.x},
                            {"xstar", e.xstar},
                            {"reason", "not an envelope subgradient"}};
            return cert;
        }
    }

    // (b) envelope graph with matching values -> sampled graph membership.
    // The scan keeps a two-step margin off the window boundary: at the
    // edge-most sampled anchors the discretized envelope's subgradient cone
    // widens spuriously (the true envelope carries tangents from beyond).
    std::vector<Vec> dual_pts;
    for_each_grid_point(dual_grid, [&](const Vec& v) {
        if (in_window_dual(space, window, v)) dual_pts.push_back(v);
    });
    double interior_radius = window.radius_x - 2.0 * grid.max_spacing();
    for (std::size_t i = 0; i < wg.points.size(); ++i) {
        const Vec& x = wg.points[i];
        if (!std::isfinite(wg.values[i])) continue;
        if (norm(space, sub(x, window.center_x)) >= interior_radius) continue;
        if (std::abs(hat_values[i] - wg.values[i]) > tol) continue;
        for (const auto& v : dual_pts) {
            if (!hat_subgradient_ok(x, hat_values[i], v)) continue;
            // the grid test for the envelope admits slopes up to tol/h past
            // the half-cell width; the membership check gets the same slack
            double member_tol =
                std::max(default_membership_tol(v), 2.0 * tol / grid.max_spacing());
            auto member = is_regular_subgradient(f, space, x, v, 0.0,
                                                 probe_radius, grid, member_tol);
            bool value_ok = wg.values[i] < window.f_center + window.eps_value + tol;
            if (!member.passes || !value_ok) {
                cert.verdict = Verdict::FailsWithWitness;
                cert.witness = {{"direction", "envelope_to_sample"},
                                {"x", x},
                                {"xstar", v},
                                {"membership_passes", member.passes},
                                {"attentive_value_ok", value_ok},
                                {"min_quotient", member.min_quotient}};
                return cert;
            }
        }
    }
    return cert;
}

/// Pairwise monotonicity of the attentive sample (modulus kappa, default 0).
inline Certificate certify_phi_local_monotone(const GraphSample& sample_filtered,
                                              const PNormSpace& space,
                                              double kappa = 0.0) {
    Certificate cert;
    cert.criterion = "local_monotone";
    cert.params["kappa"] = kappa;
    if (sample_filtered.entries.empty())
        throw EmptySample("certify_phi_local_monotone: empty sample");
    double scale = 0.0;
    for (const auto& e : sample_filtered.entries)
        scale = std::max(scale, std::abs(e.fx));
    double tol = certifier_tol(scale);
    cert.params["tol"] = tol;
    cert.verdict = Verdict::Holds;
    auto entries = sample_filtered.entries;
    std::sort(entries.begin(), entries.end(), entry_lex_less);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            double prod = monotone_product(entries[i], entries[j]);
            double dx = norm(space, sub(entries[i].x, entries[j].x));
            if (prod < kappa * dx * dx - tol) {
                cert.verdict = Verdict::FailsWithWitness;
                cert.witness = {{"x1", entries[i].x},
                                {"x1star", entries[i].xstar},
                                {"x2", entries[j].x},
                                {"x2star", entries[j].xstar},
                                {"product", prod}};
                return cert;
            }
        }
    }
    return cert;
}

/// Sampled-extension surrogate for local maximal monotonicity: a grid pair in
/// the (margin-shrunk) window that is monotonically consistent with every
/// sample entry, lies beyond sample resolution, satisfies the attentive value
/// bound, and is not itself a subgradient pair witnesses a strict monotone
/// extension. Holds means no such pair exists at this resolution.
inline Certificate certify_phi_local_maximal_monotone(
    const TestFunction& f, const PNormSpace& space,
    const GraphSample& sample_filtered, const AttentiveWindow& window,
    const Box& grid, const Box& dual_grid) {
    Certificate cert;
    cert.criterion = "local_max_monotone";
    cert.window = window;
    Certificate mono = certify_phi_local_monotone(sample_filtered, space);
    if (mono.fails()) {
        cert.verdict = Verdict::FailsWithWitness;
        cert.witness = mono.witness;
        cert.notes.push_back("monotonicity precondition failed");
        return cert;
    }
    double hp = grid.max_spacing();
    double hd = dual_grid.max_spacing();
    double radius_x = window.radius_x - 2.0 * hp;
    double radius_dual = window.radius_dual - 2.0 * hd;
    if (radius_x <= 0 || radius_dual <= 0)
        return Certificate::inconclusive("local_max_monotone",
                                         "window too coarse for margins");
    double scale = 0.0;
    for (const auto& e : sample_filtered.entries)
        scale = std::max(scale, std::abs(e.fx));
    double tol = certifier_tol(scale);
    double probe_radius = 3.0 * hp;
    cert.params["tol"] = tol;
    cert.params["resolution_x"] = hp;
    cert.params["resolution_dual"] = hd;
    cert.notes.push_back(
        "sampled-extension surrogate: Holds = no monotone extension found at "
        "this resolution");

    std::vector<Vec> dual_pts;
    for_each_grid_point(dual_grid, [&](const Vec& v) {
        if (dual_norm(space, sub(v, window.center_xstar)) < radius_dual)
            dual_pts.push_back(v);
    });

    cert.verdict = Verdict::Holds;
    for_each_grid_point(grid, [&](const Vec& z) {
        if (cert.verdict != Verdict::Holds) return;
        if (norm(space, sub(z, window.center_x)) >= radius_x) return;
        ExtReal fz = f.eval(z);
        if (!fz.finite() || !attentive_value(window, fz.value())) return;
        for (const auto& zstar : dual_pts) {
            if (cert.verdict != Verdict::Holds) break;
            // max-metric resolution with slack: lattice neighbors of a
            // sampled pair are not extension candidates
            bool near_sample = false;
            for (const auto& e : sample_filtered.entries)
                if (dist_inf(z, e.x) <= 1.5 * hp &&
                    dist_inf(zstar, e.xstar) <= 1.5 * hd) {
                    near_sample = true;
                    break;
                }
            if (near_sample) continue;
            bool consistent = true;
            for (const auto& e : sample_filtered.entries)
                if (dot(sub(zstar, e.xstar), sub(z, e.x)) < -tol) {
                    consistent = false;
                    break;
                }
            if (!consistent) continue;
            auto member =
                is_regular_subgradient(f, space, z, zstar, 0.0, probe_radius, grid);
            if (!member.passes) {
                cert.verdict = Verdict::FailsWithWitness;
                cert.witness = {{"z", z},
                                {"zstar", zstar},
                                {"membership_min_quotient", member.min_quotient},
                                {"membership_witness", member.witness}};
            }
        }
    });
    return cert;
}

/// Midpoint-convexity scan of the tilted envelope around xbar for every
/// lambda on the ladder. The verified neighborhood shrinks with lambda, so
/// the radius halves (up to max_shrinks) before a failure is final; an
/// unbounded envelope evaluation is itself a witness.
struct EnvelopeConvexityOptions {
    int ball_points = 13;
    double search_halfwidth = 2.0;
    int search_points = 1601;
    int max_shrinks = 4;
};

inline Certificate certify_envelope_local_convexity(
    const TestFunction& f, const PNormSpace& space, const Vec& xbar,
    const Vec& xbarstar, const std::vector<double>& lambda_list, double radius,
    EnvelopeConvexityOptions opts = {}) {
    Certificate cert;
    cert.criterion = "envelope_convexity";
    cert.params["lambda_list"] = lambda_list;
    Box search = ball_box(xbar, opts.search_halfwidth, opts.search_points);

    json last_witness;
    for (int shrink = 0; shrink <= opts.max_shrinks; ++shrink) {
        double r = radius / static_cast<double>(1 << shrink);
        bool all_ok = true;
        for (double lambda : lambda_list) {
            if (!all_ok) break;
            Box ball = ball_box(xbar, r, opts.ball_points);
            std::vector<Vec> pts = grid_points(ball);
            std::map<Vec, double> cache;
            bool unbounded_seen = false;
            Vec unbounded_at;
            auto eval_env = [&](const Vec& y) {
                auto it = cache.find(y);
                if (it != cache.end()) return it->second;
                EnvelopeResult e = envelope(f, space, lambda, y, xbarstar, search);
                double v;
                if (e.unbounded) {
                    if (!unbounded_seen) {
                        unbounded_seen = true;
                        unbounded_at = y;
                    }
                    v = -kInf;
                } else {
                    v = e.value.raw();
                }
                cache.emplace(y, v);
                return v;
            };
            double scale = 0.0;
            for (const auto& y : pts) {
                double v = eval_env(y);
                if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
            }
            if (unbounded_seen) {
                all_ok = false;
                last_witness = {{"lambda", lambda},
                                {"x", unbounded_at},
                                {"reason", "envelope unbounded"},
                                {"radius", r}};
                break;
            }
            double tol = certifier_tol(scale);
            for (std::size_t i = 0; i < pts.size() && all_ok; ++i) {
                for (std::size_t j = i + 1; j < pts.size() && all_ok; ++j) {
                    double em = eval_env(midpoint(pts[i], pts[j]));
                    double avg = 0.5 * (eval_env(pts[i]) + eval_env(pts[j]));
                    if (em > avg + tol) {
                        all_ok = false;
                        last_witness = {{"lambda", lambda},
                                        {"x", pts[i]},
                                        {"y", pts[j]},
                                        {"midpoint_gap", em - avg},
                                        {"radius", r}};
                    }
                }
            }
        }
        if (all_ok) {
            cert.verdict = Verdict::Holds;
            cert.params["radius"] = r;
            cert.params["shrinks"] = shrink;
            if (shrink > 0)
                cert.notes.push_back("radius halved " + std::to_string(shrink) +
                                     " time(s): envelope convexity is local, "
                                     "with a lambda-dependent neighborhood");
            return cert;
        }
    }
    cert.verdict = Verdict::FailsWithWitness;
    cert.witness = last_witness;
    cert.params["shrinks"] = opts.max_shrinks;
    return cert;
}

/// Nonnegativity and unique-argmin check of the quadratically penalized gap
/// function built from the affine envelope value at the window center.
inline Certificate certify_penalized_gap(const TestFunction& f,
                                         const PNormSpace& space,
                                         const AttentiveWindow& window,
                                         double envelope_at_center,
                                         const Box& grid, double tol = 1e-9) {
    Certificate cert;
    cert.criterion = "penalized_gap_minimum";
    cert.window = window;
    const Vec& c = window.center_x;
    auto psi = [&](const Vec& y) -> ExtReal {
        if (norm(space, sub(y, c)) > window.radius_x) return ExtReal::infinity();
        ExtReal fy = f.eval(y);
        if (!fy.finite()) return fy;
        double d = norm(space, sub(y, c));
        return ExtReal(fy.value() - envelope_at_center -
                       dot(window.center_xstar, sub(y, c)) + 0.5 * d * d);
    };
    ExtReal min_psi = ExtReal::infinity();
    for_each_grid_point(grid, [&](const Vec& y) { min_psi = ext_min(min_psi, psi(y)); });
    if (!min_psi.finite())
        return Certificate::inconclusive("penalized_gap_minimum",
                                         "grid misses the effective domain");
    cert.params["min_value"] = min_psi.value();
    if (min_psi.value() < -tol) {
        Vec witness;
        for_each_grid_point(grid, [&](const Vec& y) {
            if (!witness.empty()) return;
            ExtReal v = psi(y);
            if (v.finite() && v.value() <= min_psi.value() + 1e-15)
                witness = y;
        });
        cert.verdict = Verdict::FailsWithWitness;
        cert.witness = {{"y", witness}, {"min_value", min_psi.value()}};
        return cert;
    }
    double cell = grid.max_spacing();
    double keep = min_psi.value() + tol;
    cert.verdict = Verdict::Holds;
    for_each_grid_point(grid, [&](const Vec& y) {
        if (cert.verdict != Verdict::Holds) return;
        ExtReal v = psi(y);
        if (v.finite() && v.value() <= keep && dist_inf(y, c) > cell + 1e-12) {
            cert.verdict = Verdict::FailsWithWitness;
            cert.witness = {{"y", y},
                            {"value", v.value()},
                            {"reason", "argmin not within one cell of center"}};
        }
    });
    return cert;
}

/// Hilbert-space shift identity between tilted and plain envelopes, plus
/// agreement of their local-convexity verdicts on matched balls.
inline Certificate hilbert_envelope_shift_check(
    const TestFunction& f, const PNormSpace& space, const Vec& xbar,
    const Vec& vbar, double lambda, const Box& ball_grid,
    EnvelopeConvexityOptions opts = {}, double tol = 1e-8) {
    if (space.p != 2.0)
        throw std::invalid_argument("hilbert_envelope_shift_check: requires p = 2");
    Certificate cert;
    cert.criterion = "hilbert_envelope_shift";
    cert.params["lambda"] = lambda;
    Box search = ball_box(xbar, opts.search_halfwidth, opts.search_points);
    Vec zero(xbar.size(), 0.0);
    double offset_const = 0.5 * lambda * dot(vbar, vbar);

    cert.verdict = Verdict::Holds;
    bool any_unbounded = false;
    for_each_grid_point(ball_grid, [&](const Vec& x) {
        if (cert.verdict != Verdict::Holds || any_unbounded) return;
        EnvelopeResult lhs = envelope(f, space, lambda, x, vbar, search);
        EnvelopeResult rhs =
            envelope(f, space, lambda, axpy(lambda, vbar, x), zero, search);
        if (lhs.unbounded || rhs.unbounded) {
            any_unbounded = true;
            return;
        }
        double rhs_value = rhs.value.value() - dot(vbar, x) - offset_const;
        double gap = lhs.value.value() - rhs_value;
        if (std::abs(gap) > tol * (1.0 + std::abs(lhs.value.value()))) {
            cert.verdict = Verdict::FailsWithWitness;
            cert.witness = {{"x", x}, {"gap", gap}};
        }
    });
    if (any_unbounded)
        return Certificate::inconclusive("hilbert_envelope_shift",
                                         "envelope unbounded");
    if (cert.verdict != Verdict::Holds) return cert;

    // local-convexity agreement of the two envelopes around matched centers
    double radius = 0.0;
    for (std::size_t i = 0; i < ball_grid.lo.size(); ++i)
        radius = std::max(radius, 0.5 * (ball_grid.hi[i] - ball_grid.lo[i]));
    Certificate tilted = certify_envelope_local_convexity(
        f, space, xbar, vbar, {lambda}, radius, opts);
    Certificate plain = certify_envelope_local_convexity(
        f, space, axpy(lambda, vbar, xbar), zero, {lambda}, radius, opts);
    cert.params["tilted_convexity"] = to_string(tilted.verdict);
    cert.params["plain_convexity"] = to_string(plain.verdict);
    if (tilted.verdict != plain.verdict) {
        cert.verdict = Verdict::FailsWithWitness;
        cert.witness = {{"tilted", to_string(tilted.verdict)},
                        {"plain", to_string(plain.verdict)}};
    }
    return cert;
}

}  // namespace varconvex
