#include <catch2/catch_amalgamated.hpp>

#include "varconvex/catalog.hpp"
#include "varconvex/grid.hpp"
#include "varconvex/pnorm_space.hpp"
#include "varconvex/subgradient.hpp"

using namespace varconvex;

TEST_CASE("grid_points: spacing, tensor order, cap") {
    auto g1 = grid_points(Box({0.0}, {1.0}, 3));
    REQUIRE(g1.size() == 3);
    CHECK(g1[0][0] == 0.0);
    CHECK(g1[1][0] == 0.5);
    CHECK(g1[2][0] == 1.0);

    auto g3 = grid_points(Box({-1.0}, {1.0}, 5));
    std::vector<double> expect = {-1.0, -0.5, 0.0, 0.5, 1.0};
    REQUIRE(g3.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(g3[i][0] == Catch::Approx(expect[i]));

    // lexicographic tensor order needs points_per_axis >= 3; check the
    // leading-axis-slowest convention on a 3x3 grid
    auto g2 = grid_points(Box({0.0, 0.0}, {1.0, 1.0}, 3));
    REQUIRE(g2.size() == 9);
    CHECK(g2[0] == Vec{0.0, 0.0});
    CHECK(g2[1] == Vec{0.0, 0.5});
    CHECK(g2[2] == Vec{0.0, 1.0});
    CHECK(g2[3] == Vec{0.5, 0.0});
    CHECK(g2[8] == Vec{1.0, 1.0});

    CHECK_THROWS_AS(grid_points(Box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 300)),
                    GridTooLarge);
    CHECK_THROWS(Box({1.0}, {0.0}, 3));
    CHECK_THROWS(Box({0.0}, {1.0}, 2));
}

TEST_CASE("catalog lookup") {
    const auto& q = catalog_get("quadratic1d");
    CHECK(q.flags.convex);
    CHECK(q.eval({2.0}).value() == Catch::Approx(2.0));
    const auto& n = catalog_get("neg_quadratic");
    CHECK(n.eval({2.0}).value() == Catch::Approx(-2.0));
    CHECK_THROWS_AS(catalog_get("nope"), UnknownFunction);
    CHECK(catalog().size() >= 8);
}

TEST_CASE("catalog entries are proper and deterministic on their boxes") {
    for (const auto& f : catalog()) {
        Box box(f.domain_lo, f.domain_hi, 9);
        bool any_finite = false;
        for_each_grid_point(box, [&](const Vec& x) {
            ExtReal v1 = f.eval(x);
            ExtReal v2 = f.eval(x);
            CHECK(v1.raw() == v2.raw());
            any_finite = any_finite || v1.finite();
        });
        CHECK(any_finite);
    }
}

TEST_CASE("wshape: 0 is a regular subgradient at 0 (fine-grid check)") {
    const auto& w = catalog_get("wshape");
    auto space = make_pnorm_space(1, 2.0);
    Box fine({-0.5}, {0.5}, 1001);  // 1e-3 spacing
    auto r = is_regular_subgradient(w, space, {0.0}, {0.0}, 0.0, 0.4, fine);
    CHECK(r.passes);
    // endpoints of the analytic interval at the kink
    auto rp = is_regular_subgradient(w, space, {0.0}, {0.9}, 0.0, 0.05, fine);
    CHECK(rp.passes);
    // outside the interval fails with a witness
    auto rf = is_regular_subgradient(w, space, {0.0}, {1.5}, 0.0, 0.4, fine);
    CHECK_FALSE(rf.passes);
}

TEST_CASE("convex-flagged entries pass sampled midpoint convexity") {
    for (const auto& f : catalog()) {
        if (!f.flags.convex) continue;
        Box box(f.domain_lo, f.domain_hi, f.dim >= 2 ? 9 : 33);
        auto pts = grid_points(box);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                ExtReal fi = f.eval(pts[i]);
                ExtReal fj = f.eval(pts[j]);
                if (!fi.finite() || !fj.finite()) continue;
                ExtReal fm = f.eval(midpoint(pts[i], pts[j]));
                REQUIRE(fm.finite());
                CHECK(fm.value() <= 0.5 * (fi.value() + fj.value()) + 1e-9);
            }
        }
    }
}

TEST_CASE("convex entries: analytic subgradients satisfy the global inequality") {
    auto space = make_pnorm_space(1, 2.0);
    for (const auto& f : catalog()) {
        if (!f.flags.convex || !f.analytic_subdiff || f.dim != 1) continue;
        Box box(f.domain_lo, f.domain_hi, 41);
        auto pts = grid_points(box);
        for (const auto& x : pts) {
            ExtReal fx = f.eval(x);
            if (!fx.finite()) continue;
            SubdiffSet set = (*f.analytic_subdiff)(x);
            for (const auto& g : set.points) {
                for (const auto& y : pts) {
                    ExtReal fy = f.eval(y);
                    if (!fy.finite()) continue;
                    CHECK(fy.value() >=
                          fx.value() + dot(g, sub(y, x)) - 1e-9);
                }
            }
        }
    }
}
