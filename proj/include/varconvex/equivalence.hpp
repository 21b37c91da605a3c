#pragma once

#include <future>
#include <string>
#include <vector>

#include "varconvex/certify.hpp"
#include "varconvex/parallel.hpp"

namespace varconvex {

struct MatrixConfig {
    double radius_x = 0.25;
    double radius_dual = 0.25;
    double eps_value = 0.05;
    int points_per_axis_1d = 41;
    int points_per_axis_2d = 17;
    std::vector<double> lambda_ladder = {0.4, 0.2, 0.1, 0.05};
    std::vector<double> lambda_probe_grid;  // for the prox-bound report
    std::vector<double> probe_coords = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    EnvelopeConvexityOptions envelope;
    int max_window_shrinks = 4;
    bool parallel_rows = true;

    int points_per_axis(int dim) const {
        return dim >= 2 ? points_per_axis_2d : points_per_axis_1d;
    }
};

/// Joint verdicts of the five certifiers at one graph point, plus the
/// consistency flag over the implication structure.
struct EquivalenceMatrix {
    std::string function;
    Vec xbar;
    Vec xbarstar;
    Certificate vc_definition;
    Certificate subgradient_inequality;
    Certificate local_max_monotone;
    Certificate local_monotone;
    Certificate envelope_convexity;
    bool consistent = true;
    bool prox_regular_flagged = false;
    bool prox_bounded = false;
    json params = json::object();

    std::vector<const Certificate*> rows() const {
        return {&vc_definition, &subgradient_inequality, &local_max_monotone,
                &local_monotone, &envelope_convexity};
    }
};

namespace detail {

struct Edge {
    const Certificate* from;
    const Certificate* to;
    const char* label;
};

/// Implication edges active for the given flags. Both directions between the
/// definition and the subgradient inequality hold on R^n; the envelope limb
/// needs prox-boundedness and prox-regularity.
inline std::vector<Edge> implication_edges(const EquivalenceMatrix& m) {
    std::vector<Edge> edges = {
        {&m.vc_definition, &m.subgradient_inequality, "definition->inequality"},
        {&m.subgradient_inequality, &m.vc_definition, "inequality->definition"},
        {&m.vc_definition, &m.local_max_monotone, "definition->max_monotone"},
        {&m.local_max_monotone, &m.local_monotone, "max_monotone->monotone"},
    };
    if (m.prox_regular_flagged && m.prox_bounded) {
        edges.push_back({&m.local_monotone, &m.envelope_convexity,
                         "monotone->envelope_convexity"});
        edges.push_back({&m.envelope_convexity, &m.vc_definition,
                         "envelope_convexity->definition"});
    }
    return edges;
}

inline bool edges_consistent(const EquivalenceMatrix& m,
                             std::vector<std::string>* violated = nullptr) {
    bool ok = true;
    for (const auto& e : implication_edges(m)) {
        if (e.from->holds() && e.to->fails()) {
            ok = false;
            if (violated) violated->push_back(e.label);
        }
    }
    return ok;
}

inline bool point_flagged_prox_regular(const TestFunction& f, const Vec& x,
                                       const Vec& xstar) {
    for (const auto& [px, ps] : f.flags.known_prox_regular_at)
        if (dist_inf(px, x) < 1e-12 && dist_inf(ps, xstar) < 1e-12) return true;
    return false;
}

}  // namespace detail

/// Lambda ladder scaled to sit below an observed prox-bound bracket.
inline std::vector<double> scaled_lambda_ladder(const std::vector<double>& ladder,
                                                double lambda_zero_lower) {
    double top = *std::max_element(ladder.begin(), ladder.end());
    double sigma = 1.0;
    if (lambda_zero_lower > 0 && std::isfinite(lambda_zero_lower))
        sigma = std::min(1.0, 0.8 * lambda_zero_lower / top);
    std::vector<double> out;
    for (double l : ladder) out.push_back(l * sigma);
    return out;
}

/// Runs all five certifiers with shared window and grids. When an implication
/// that theory predicts is violated, the failing certifier is retried on a
/// halved window (recorded) before the matrix is flagged inconsistent.
inline EquivalenceMatrix equivalence_matrix(const TestFunction& f,
                                            const PNormSpace& space,
                                            const Vec& xbar, const Vec& xbarstar,
                                            MatrixConfig cfg = {}) {
    // precondition: xbarstar is a subgradient at xbar
    if (f.analytic_subdiff) {
        SubdiffSet set = (*f.analytic_subdiff)(xbar);
        if (!set.contains(xbarstar, 1e-9))
            throw std::invalid_argument(
                "equivalence_matrix: center is not a subgradient pair");
    }

    EquivalenceMatrix m;
    m.function = f.name;
    m.xbar = xbar;
    m.xbarstar = xbarstar;
    m.prox_regular_flagged = detail::point_flagged_prox_regular(f, xbar, xbarstar);

    if (f.dim >= 2) {
        cfg.envelope.ball_points = std::min(cfg.envelope.ball_points, 7);
        cfg.envelope.search_points = std::min(cfg.envelope.search_points, 41);
        cfg.envelope.search_halfwidth = std::min(cfg.envelope.search_halfwidth, 1.5);
    }

    // prox-bound bracket scales the ladder
    std::vector<double> lgrid = cfg.lambda_probe_grid;
    if (lgrid.empty())
        for (double l = 0.05; l <= 1.2501; l += 0.05) lgrid.push_back(l);
    std::vector<Vec> probes;
    for (double c : cfg.probe_coords) probes.push_back(Vec(f.dim, c));
    // the probe box must be wide enough that a divergence beyond a local dip
    // still reaches the box boundary (e.g. |w| - w^2 + w^2/(2*lambda) near
    // the threshold dips at 0 and only escapes far out)
    Box probe_search = ball_box(Vec(f.dim, 0.0), f.dim >= 2 ? 8.0 : 32.0,
                                f.dim >= 2 ? 41 : 1601);
    ProxBoundReport pb = prox_bound_threshold(f, space, lgrid, probes, probe_search);
    m.prox_bounded = pb.lambda_zero_lower > 0.0;
    std::vector<double> ladder =
        scaled_lambda_ladder(cfg.lambda_ladder, pb.lambda_zero_lower);
    m.params["lambda_zero_lower"] = pb.lambda_zero_lower;
    m.params["lambda_zero_upper"] = pb.lambda_zero_upper;
    m.params["lambda_ladder"] = ladder;

    auto run_rows = [&](double rx, double rd, double ev) {
        AttentiveWindow window = make_window(f, xbar, xbarstar, rx, rd, ev);
        int ppa = cfg.points_per_axis(f.dim);
        Box grid = ball_box(xbar, rx, ppa);
        Box dual_grid = ball_box(xbarstar, rd, ppa);
        GraphSample sample = sample_graph(f, space, window, grid, dual_grid);
        GraphSample filtered = attentive_filter(sample, space, window);

        auto vc = [&] {
            return certify_variational_convexity_def(f, space, window, sample,
                                                     grid, dual_grid);
        };
        auto ineq = [&] {
            return certify_subgradient_inequality(f, space, window, sample, grid);
        };
        auto maxmono = [&] {
            return certify_phi_local_maximal_monotone(f, space, filtered, window,
                                                      grid, dual_grid);
        };
        auto mono = [&] { return certify_phi_local_monotone(filtered, space); };
        auto envc = [&] {
            return certify_envelope_local_convexity(f, space, xbar, xbarstar,
                                                    ladder, rx, cfg.envelope);
        };
        if (cfg.parallel_rows) {
            auto f1 = std::async(std::launch::async, vc);
            auto f2 = std::async(std::launch::async, ineq);
            auto f3 = std::async(std::launch::async, maxmono);
            auto f4 = std::async(std::launch::async, mono);
            m.envelope_convexity = envc();
            m.vc_definition = f1.get();
            m.subgradient_inequality = f2.get();
            m.local_max_monotone = f3.get();
            m.local_monotone = f4.get();
        } else {
            m.vc_definition = vc();
            m.subgradient_inequality = ineq();
            m.local_max_monotone = maxmono();
            m.local_monotone = mono();
            m.envelope_convexity = envc();
        }
    };

    double rx = cfg.radius_x, rd = cfg.radius_dual, ev = cfg.eps_value;
    run_rows(rx, rd, ev);
    std::vector<std::string> violated;
    int shrinks = 0;
    while (!detail::edges_consistent(m, nullptr) && shrinks < cfg.max_window_shrinks) {
        ++shrinks;
        rx *= 0.5;
        rd *= 0.5;
        ev *= 0.5;
        run_rows(rx, rd, ev);
        m.params["window_shrinks"] = shrinks;
    }
    violated.clear();
    m.consistent = detail::edges_consistent(m, &violated);
    if (!violated.empty()) m.params["violated_implications"] = violated;
    m.params["radius_x"] = rx;
    m.params["radius_dual"] = rd;
    m.params["eps_value"] = ev;
    m.params["prox_regular_flagged"] = m.prox_regular_flagged;
    m.params["prox_bounded"] = m.prox_bounded;
    return m;
}

/// Designated catalog matrix points: one per core entry.
inline std::vector<std::pair<std::string, std::pair<Vec, Vec>>>
designated_matrix_points() {
    return {
        {"quadratic1d", {{0.0}, {0.0}}},
        {"abs", {{0.0}, {0.0}}},
        {"neg_quadratic", {{0.0}, {0.0}}},
        {"wshape", {{0.0}, {0.0}}},
        {"indicator_interval", {{1.0}, {0.0}}},
        {"cubic", {{0.0}, {0.0}}},
        {"quad2d", {{0.0, 0.0}, {0.0, 0.0}}},
        {"saddle", {{0.0, 0.0}, {0.0, 0.0}}},
    };
}

}  // namespace varconvex
