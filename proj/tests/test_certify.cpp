#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "varconvex/catalog.hpp"
#include "varconvex/certify.hpp"
#include "varconvex/equivalence.hpp"

using namespace varconvex;

namespace {

const PNormSpace kH1 = make_pnorm_space(1, 2.0);
const PNormSpace kH2 = make_pnorm_space(2, 2.0);

struct Setup {
    AttentiveWindow window;
    Box grid;
    Box dual;
    GraphSample sample;
    GraphSample filtered;
};

Setup setup_1d(const std::string& name, double xbar, double xbarstar,
               double rx = 0.25, double rd = 0.25, double eps = 0.05,
               int pts = 41) {
    const auto& f = catalog_get(name);
    Setup s{make_window(f, {xbar}, {xbarstar}, rx, rd, eps),
            ball_box({xbar}, rx, pts), ball_box({xbarstar}, rd, pts), {}, {}};
    s.sample = sample_graph(f, kH1, s.window, s.grid, s.dual);
    s.filtered = attentive_filter(s.sample, kH1, s.window);
    return s;
}

}  // namespace

TEST_CASE("subgradient inequality certifier") {
    auto q = setup_1d("quadratic1d", 0.0, 0.0);
    auto cq = certify_subgradient_inequality(catalog_get("quadratic1d"), kH1,
                                             q.window, q.sample, q.grid);
    CHECK(cq.holds());

    // flagship: variationally convex but not locally convex
    auto w = setup_1d("wshape", 0.0, 0.0, 0.2, 0.2, 0.01);
    auto cw = certify_subgradient_inequality(catalog_get("wshape"), kH1,
                                             w.window, w.sample, w.grid);
    CHECK(cw.holds());

    auto c = setup_1d("cubic", 0.0, 0.0);
    auto cc = certify_subgradient_inequality(catalog_get("cubic"), kH1,
                                             c.window, c.sample, c.grid);
    REQUIRE(cc.fails());
    CHECK(cc.witness["x"][0].get<double>() < 0.0);
    // witness replays to the identical violation
    double replay = subgradient_gap(
        catalog_get("cubic"), cc.witness["u"].get<Vec>(),
        cc.witness["ustar"].get<Vec>(), cc.witness["fu"].get<double>(),
        cc.witness["x"].get<Vec>());
    CHECK(replay == cc.witness["gap"].get<double>());
}

TEST_CASE("window enlargement keeps failures (violations persist)") {
    const auto& f = catalog_get("cubic");
    auto small = setup_1d("cubic", 0.0, 0.0, 0.125, 0.125, 0.05);
    auto cs = certify_subgradient_inequality(f, kH1, small.window, small.sample,
                                             small.grid);
    REQUIRE(cs.fails());
    auto large = setup_1d("cubic", 0.0, 0.0, 0.25, 0.25, 0.05);
    auto cl = certify_subgradient_inequality(f, kH1, large.window, large.sample,
                                             large.grid);
    CHECK(cl.fails());
}

TEST_CASE("affine envelope: max of tangents") {
    auto q = setup_1d("quadratic1d", 0.0, 0.0);
    const auto& f = catalog_get("quadratic1d");
    auto hat = build_affine_envelope(f, q.window, q.filtered);
    // recovers the smooth convex function to O(h^2) on the window
    double h = q.grid.spacing(0);
    for (double x : {-0.2, -0.1, 0.0, 0.07, 0.19}) {
        double gap = f.eval({x}).value() - hat.eval({x}).value();
        CHECK(gap >= -1e-12);
        CHECK(gap <= h * h);
    }
    // exact midpoint convexity up to float rounding
    for (double a : {-0.2, -0.05, 0.1})
        for (double b : {-0.1, 0.05, 0.2}) {
            double lhs = hat.eval({0.5 * (a + b)}).value();
            double rhs = 0.5 * (hat.eval({a}).value() + hat.eval({b}).value());
            CHECK(lhs <= rhs + 1e-14);
        }

    // single-entry sample is the single affine function
    GraphSample one;
    one.entries = {{{0.1}, {0.3}, 0.05}};
    auto line = build_affine_envelope(f, q.window, one);
    CHECK(line.eval({1.0}).value() ==
          Catch::Approx(0.05 + 0.3 * 0.9).margin(1e-15));

    // wshape: envelope of the vertical segment pins the kink value
    auto w = setup_1d("wshape", 0.0, 0.0);
    auto what = build_affine_envelope(catalog_get("wshape"), w.window, w.filtered);
    CHECK(what.eval({0.0}).value() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("variational convexity certifier") {
    auto q = setup_1d("quadratic1d", 0.0, 0.0);
    CHECK(certify_variational_convexity_def(catalog_get("quadratic1d"), kH1,
                                            q.window, q.sample, q.grid, q.dual)
              .holds());

    auto w = setup_1d("wshape", 0.0, 0.0);
    CHECK(certify_variational_convexity_def(catalog_get("wshape"), kH1, w.window,
                                            w.sample, w.grid, w.dual)
              .holds());

    auto a = setup_1d("abs", 0.0, 0.0);
    CHECK(certify_variational_convexity_def(catalog_get("abs"), kH1, a.window,
                                            a.sample, a.grid, a.dual)
              .holds());

    auto ind = setup_1d("indicator_interval", 1.0, 0.0);
    CHECK(certify_variational_convexity_def(catalog_get("indicator_interval"),
                                            kH1, ind.window, ind.sample,
                                            ind.grid, ind.dual)
              .holds());

    auto c = setup_1d("cubic", 0.0, 0.0);
    auto cert = certify_variational_convexity_def(
        catalog_get("cubic"), kH1, c.window, c.sample, c.grid, c.dual);
    REQUIRE(cert.fails());
    CHECK(cert.witness["direction"].get<std::string>() == "sample_to_envelope");
}

TEST_CASE("local monotonicity certifier") {
    auto q = setup_1d("quadratic1d", 0.0, 0.0);
    CHECK(certify_phi_local_monotone(q.filtered, kH1).holds());

    auto c = setup_1d("cubic", 0.0, 0.0);
    auto cert = certify_phi_local_monotone(c.filtered, kH1);
    REQUIRE(cert.fails());
    // witness replays bit-identically
    GraphEntry e1{cert.witness["x1"].get<Vec>(), cert.witness["x1star"].get<Vec>(), 0};
    GraphEntry e2{cert.witness["x2"].get<Vec>(), cert.witness["x2star"].get<Vec>(), 0};
    CHECK(monotone_product(e1, e2) == cert.witness["product"].get<double>());
    // the explicit pair arithmetic: (-0.2, 0.12) against (0.1, 0.03)
    GraphEntry p1{{-0.2}, {0.12}, 0.0}, p2{{0.1}, {0.03}, 0.0};
    CHECK(monotone_product(p1, p2) == Catch::Approx(-0.027));

    auto w = setup_1d("wshape", 0.0, 0.0, 0.25, 0.25, 0.01);
    CHECK(certify_phi_local_monotone(w.filtered, kH1).holds());

    auto n = setup_1d("neg_quadratic", 0.0, 0.0);
    CHECK(certify_phi_local_monotone(n.filtered, kH1).fails());
}

TEST_CASE("strong monotonicity modulus kappa") {
    // gradient of x^2/2 is 1-strongly monotone: kappa below 1 passes, above
    // fails
    auto q = setup_1d("quadratic1d", 0.0, 0.0);
    CHECK(certify_phi_local_monotone(q.filtered, kH1, 0.9).holds());
    CHECK(certify_phi_local_monotone(q.filtered, kH1, 2.0).fails());
}

TEST_CASE("local maximal monotonicity certifier") {
    auto q = setup_1d("quadratic1d", 0.0, 0.0);
    CHECK(certify_phi_local_maximal_monotone(catalog_get("quadratic1d"), kH1,
                                             q.filtered, q.window, q.grid, q.dual)
              .holds());

    auto ind = setup_1d("indicator_interval", 1.0, 0.0, 0.5, 0.5, 0.05);
    CHECK(certify_phi_local_maximal_monotone(catalog_get("indicator_interval"),
                                             kH1, ind.filtered, ind.window,
                                             ind.grid, ind.dual)
              .holds());

    auto a = setup_1d("abs", 0.0, 0.0);
    CHECK(certify_phi_local_maximal_monotone(catalog_get("abs"), kH1, a.filtered,
                                             a.window, a.grid, a.dual)
              .holds());
}

TEST_CASE("maximal monotonicity: a constructed graph gap is witnessed") {
    // bump the function on the deleted segment so the gap pairs are genuinely
    // not subgradients, then drop the segment from the sample
    TestFunction bump;
    bump.name = "quadratic_with_bump";
    bump.dim = 1;
    bump.eval = [](const Vec& x) {
        double v = 0.5 * x[0] * x[0];
        if (x[0] > 0.0 && x[0] < 0.05) v += 0.002;
        return ExtReal(v);
    };
    bump.domain_lo = {-8.0};
    bump.domain_hi = {8.0};

    auto q = setup_1d("quadratic1d", 0.0, 0.0);
    GraphSample gapped;
    gapped.provenance = q.filtered.provenance;
    for (const auto& e : q.filtered.entries)
        if (!(e.x[0] > 0.0 && e.x[0] < 0.05)) gapped.entries.push_back(e);
    REQUIRE(gapped.entries.size() < q.filtered.entries.size());

    auto cert = certify_phi_local_maximal_monotone(bump, kH1, gapped, q.window,
                                                   q.grid, q.dual);
    REQUIRE(cert.fails());
    double z = cert.witness["z"][0].get<double>();
    CHECK(z > 0.0);
    CHECK(z < 0.05);
}

TEST_CASE("envelope local convexity certifier") {
    auto cq = certify_envelope_local_convexity(catalog_get("quadratic1d"), kH1,
                                               {0.0}, {0.0}, {0.4, 0.2, 0.1, 0.05},
                                               0.25);
    CHECK(cq.holds());
    CHECK(cq.params["shrinks"].get<int>() == 0);

    // the wshape envelope is convex only within a lambda-dependent
    // neighborhood, so the certifier must shrink before it holds
    auto cw = certify_envelope_local_convexity(catalog_get("wshape"), kH1, {0.0},
                                               {0.0}, {0.1, 0.05}, 0.1);
    CHECK(cw.holds());
    CHECK(cw.params["shrinks"].get<int>() >= 1);

    auto cc = certify_envelope_local_convexity(catalog_get("cubic"), kH1, {0.0},
                                               {0.0}, {0.4, 0.2}, 0.25);
    REQUIRE(cc.fails());
    CHECK(cc.witness["reason"].get<std::string>() == "envelope unbounded");

    auto cn = certify_envelope_local_convexity(catalog_get("neg_quadratic"), kH1,
                                               {0.0}, {0.0}, {0.4, 0.2}, 0.25);
    REQUIRE(cn.fails());
    // witness replays: midpoint gap recomputed from envelope values
    double lambda = cn.witness["lambda"].get<double>();
    Vec x = cn.witness["x"].get<Vec>();
    Vec y = cn.witness["y"].get<Vec>();
    Box search = ball_box({0.0}, 2.0, 1601);
    auto ev = [&](const Vec& p) {
        return envelope(catalog_get("neg_quadratic"), kH1, lambda, p, {0.0}, search)
            .value.value();
    };
    double gap = ev(midpoint(x, y)) - 0.5 * (ev(x) + ev(y));
    CHECK(gap == cn.witness["midpoint_gap"].get<double>());
}

TEST_CASE("penalized gap function: nonnegative with argmin at the center") {
    for (const auto* name : {"quadratic1d", "abs", "wshape"}) {
        auto s = setup_1d(name, 0.0, 0.0);
        const TestFunction& f = catalog_get(name);
        auto hat = build_affine_envelope(f, s.window, s.filtered);
        double hat_center = hat.eval(s.window.center_x).value();
        auto cert = certify_penalized_gap(f, kH1, s.window, hat_center, s.grid);
        CHECK(cert.holds());
        CHECK(cert.params["min_value"].get<double>() >= -1e-9);
    }
    auto ind = setup_1d("indicator_interval", 1.0, 0.0);
    const auto& f = catalog_get("indicator_interval");
    auto hat = build_affine_envelope(f, ind.window, ind.filtered);
    auto cert = certify_penalized_gap(f, kH1, ind.window,
                                      hat.eval({1.0}).value(), ind.grid);
    CHECK(cert.holds());
}

TEST_CASE("hilbert envelope shift identity") {
    Box ball = ball_box({0.0}, 0.2, 9);
    auto trivial = hilbert_envelope_shift_check(catalog_get("wshape"), kH1,
                                                {0.0}, {0.0}, 0.1, ball);
    CHECK(trivial.holds());
    auto quad = hilbert_envelope_shift_check(catalog_get("quadratic1d"), kH1,
                                             {0.0}, {1.0}, 1.0, ball);
    CHECK(quad.holds());
    auto w = hilbert_envelope_shift_check(catalog_get("wshape"), kH1, {0.0},
                                          {0.05}, 0.1, ball);
    CHECK(w.holds());
}

TEST_CASE("equivalence matrix: designated catalog points") {
    auto expect_all_holds = [](const EquivalenceMatrix& m) {
        CHECK(m.vc_definition.holds());
        CHECK(m.subgradient_inequality.holds());
        CHECK(m.local_max_monotone.holds());
        CHECK(m.local_monotone.holds());
        CHECK(m.envelope_convexity.holds());
        CHECK(m.consistent);
    };

    auto mq = equivalence_matrix(catalog_get("quadratic1d"), kH1, {0.0}, {0.0});
    expect_all_holds(mq);

    auto mw = equivalence_matrix(catalog_get("wshape"), kH1, {0.0}, {0.0});
    expect_all_holds(mw);

    auto mc = equivalence_matrix(catalog_get("cubic"), kH1, {0.0}, {0.0});
    CHECK(mc.vc_definition.fails());
    CHECK(mc.subgradient_inequality.fails());
    CHECK(mc.envelope_convexity.fails());
    CHECK(mc.consistent);

    auto mn = equivalence_matrix(catalog_get("neg_quadratic"), kH1, {0.0}, {0.0});
    CHECK(mn.vc_definition.fails());
    CHECK(mn.local_monotone.fails());
    CHECK(mn.envelope_convexity.fails());
    CHECK(mn.consistent);

    auto ms = equivalence_matrix(catalog_get("saddle"), kH2, {0.0, 0.0},
                                 {0.0, 0.0});
    CHECK(ms.vc_definition.fails());
    CHECK(ms.local_monotone.fails());
    CHECK(ms.envelope_convexity.fails());
    CHECK(ms.consistent);

    auto m2 = equivalence_matrix(catalog_get("quad2d"), kH2, {0.0, 0.0},
                                 {0.0, 0.0});
    expect_all_holds(m2);
}

TEST_CASE("one-directional implications on randomized windows (smoke)") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> radii(0.08, 0.3);
    std::uniform_real_distribution<double> epss(0.01, 0.1);
    auto points = designated_matrix_points();
    int checked = 0;
    for (int trial = 0; trial < 24; ++trial) {
        auto& [name, pt] = points[trial % points.size()];
        const auto& f = catalog_get(name);
        if (f.dim != 1) continue;
        double rx = radii(rng), rd = radii(rng), ev = epss(rng);
        Setup s = setup_1d(name, pt.first[0], pt.second[0], rx, rd, ev);
        Certificate ineq = certify_subgradient_inequality(f, kH1, s.window,
                                                          s.sample, s.grid);
        Certificate vc = certify_variational_convexity_def(
            f, kH1, s.window, s.sample, s.grid, s.dual);
        Certificate mono = certify_phi_local_monotone(s.filtered, kH1);
        if (ineq.holds()) CHECK(vc.holds());
        if (vc.holds()) CHECK(mono.holds());
        ++checked;
    }
    CHECK(checked >= 15);
}
