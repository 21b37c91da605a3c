#include <catch2/catch_amalgamated.hpp>

#include "varconvex/catalog.hpp"
#include "varconvex/epi_limits.hpp"

using namespace varconvex;

namespace {

TestFunction make_1d(const std::string& name,
                     std::function<ExtReal(double)> g) {
    TestFunction f;
    f.name = name;
    f.dim = 1;
    f.eval = [g](const Vec& x) { return g(x[0]); };
    f.domain_lo = {-8.0};
    f.domain_hi = {8.0};
    return f;
}

bool sets_match(const std::vector<Vec>& got, const std::vector<Vec>& expect,
                double tol) {
    if (got.size() != expect.size()) return false;
    for (const auto& e : expect) {
        bool found = false;
        for (const auto& g : got)
            if (dist_inf(g, e) <= tol) found = true;
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("set limits: constant, convergent, oscillating") {
    const int K = 40;
    const double tol = 0.06;

    std::vector<std::vector<Vec>> constant(K, {{0.0}, {1.0}});
    CHECK(sets_match(set_outer_limit(constant, tol), {{0.0}, {1.0}}, tol));
    CHECK(sets_match(set_inner_limit(constant, tol), {{0.0}, {1.0}}, tol));

    std::vector<std::vector<Vec>> convergent;
    for (int k = 1; k <= K; ++k) convergent.push_back({{1.0 / k}});
    CHECK(sets_match(set_outer_limit(convergent, tol), {{0.0}}, tol));
    CHECK(sets_match(set_inner_limit(convergent, tol), {{0.0}}, tol));

    std::vector<std::vector<Vec>> oscillating;
    for (int k = 1; k <= K; ++k)
        oscillating.push_back({{k % 2 == 0 ? 1.0 : -1.0}});
    CHECK(sets_match(set_outer_limit(oscillating, tol), {{-1.0}, {1.0}}, tol));
    CHECK(set_inner_limit(oscillating, tol).empty());

    // mixed: only the convergent point survives the inner limit
    std::vector<std::vector<Vec>> mixed;
    for (int k = 1; k <= K; ++k)
        mixed.push_back({{1.0 / k}, {k % 2 == 0 ? 1.0 : -1.0}});
    CHECK(sets_match(set_inner_limit(mixed, tol), {{0.0}}, tol));
    // inner is always contained in outer
    auto inner = set_inner_limit(mixed, tol);
    auto outer = set_outer_limit(mixed, tol);
    for (const auto& p : inner) {
        bool inside = false;
        for (const auto& q : outer)
            if (dist_inf(p, q) <= tol) inside = true;
        CHECK(inside);
    }
}

TEST_CASE("epi-convergence: uniform shift") {
    FunctionSequence seq;
    seq.k_max = 32;
    seq.generator = [](int k) {
        return make_1d("shift", [k](double x) {
            return ExtReal(x * x + 1.0 / k);
        });
    };
    auto limit = make_1d("sq", [](double x) { return ExtReal(x * x); });
    Box grid({-1.0}, {1.0}, 21);
    CHECK(epi_converges(seq, limit, grid, 0.1, 0.25).holds());
}

TEST_CASE("epi-convergence: truncation") {
    FunctionSequence seq;
    seq.k_max = 32;
    seq.generator = [](int k) {
        return make_1d("trunc", [k](double x) {
            return ExtReal(std::min(x * x, static_cast<double>(k)));
        });
    };
    auto limit = make_1d("sq", [](double x) { return ExtReal(x * x); });
    Box grid({-2.0}, {2.0}, 21);
    CHECK(epi_converges(seq, limit, grid, 0.1, 0.25).holds());
}

TEST_CASE("epi-convergence: moving indicator spikes on grid points") {
    // delta at s_k -> delta at 0, with s_k snapped to the grid so the
    // recovery search can see the wells
    const double spacing = 0.1;
    FunctionSequence seq;
    seq.k_max = 48;
    seq.generator = [spacing](int k) {
        double s = spacing * std::floor(2.0 / (k * spacing));
        return make_1d("spike", [s](double x) {
            return std::abs(x - s) < 1e-12 ? ExtReal(0.0) : ExtReal::infinity();
        });
    };
    auto limit = make_1d("spike0", [](double x) {
        return x == 0.0 ? ExtReal(0.0) : ExtReal::infinity();
    });
    Box grid({-2.0}, {2.0}, 41);
    auto cert = epi_converges(seq, limit, grid, 1e-6, 2.0);
    CHECK(cert.holds());

    // discretized epigraphs converge as sets to the limit epigraph
    std::vector<std::vector<Vec>> epigraphs;
    for (int k = 1; k <= seq.k_max; ++k)
        epigraphs.push_back(DiscreteEpigraph::from_function(seq.generator(k), grid)
                                .point_cloud(0.0, 1.0, 6));
    auto outer = set_outer_limit(epigraphs, 0.15);
    auto inner = set_inner_limit(epigraphs, 0.15);
    auto expect =
        DiscreteEpigraph::from_function(limit, grid).point_cloud(0.0, 1.0, 6);
    CHECK(sets_match(outer, expect, 0.15));
    CHECK(sets_match(inner, expect, 0.15));
}

TEST_CASE("epi-convergence failure is witnessed") {
    // spikes oscillating between +-1 admit no epi-limit
    FunctionSequence seq;
    seq.k_max = 32;
    seq.generator = [](int k) {
        double s = k % 2 == 0 ? -1.0 : 1.0;
        return make_1d("osc", [s](double x) {
            return std::abs(x - s) < 1e-12 ? ExtReal(0.0) : ExtReal::infinity();
        });
    };
    auto limit = make_1d("spike1", [](double x) {
        return x == 1.0 ? ExtReal(0.0) : ExtReal::infinity();
    });
    Box grid({-2.0}, {2.0}, 41);
    CHECK(epi_converges(seq, limit, grid, 1e-6, 2.0).fails());
}

TEST_CASE("inf upper semicontinuity surrogate") {
    Box grid({-1.0}, {1.0}, 21);
    auto limit = make_1d("sq", [](double x) { return ExtReal(x * x); });

    FunctionSequence up;
    up.k_max = 32;
    up.generator = [](int k) {
        return make_1d("up", [k](double x) { return ExtReal(x * x + 1.0 / k); });
    };
    auto cert = inf_upper_semicontinuity_check(up, limit, grid, 0.07);
    CHECK(cert.holds());
    // equality gap is 1/k_max
    CHECK(cert.params["tail_min_inf"].get<double>() ==
          Catch::Approx(1.0 / 32.0));

    FunctionSequence down;
    down.k_max = 32;
    down.generator = [](int k) {
        return make_1d("down", [k](double x) { return ExtReal(x * x - 1.0 / k); });
    };
    CHECK(inf_upper_semicontinuity_check(down, limit, grid, 0.07).holds());
}

TEST_CASE("argmin convergence: shifted wells and flat limits") {
    Box grid({-1.0}, {1.0}, 21);
    const double ctol = 0.2;  // 2x grid spacing

    FunctionSequence shifted;
    shifted.k_max = 64;
    shifted.generator = [](int k) {
        return make_1d("shifted", [k](double x) {
            double d = x - 1.0 / k;
            return ExtReal(d * d);
        });
    };
    auto limit = make_1d("sq", [](double x) { return ExtReal(x * x); });
    CHECK(argmin_convergence_check(shifted, limit, grid, ctol).holds());

    FunctionSequence constant;
    constant.k_max = 16;
    constant.generator = [](int) {
        return make_1d("c", [](double x) { return ExtReal(x * x); });
    };
    CHECK(argmin_convergence_check(constant, limit, grid, ctol).holds());

    // flattening sequence: argmins {0} cluster inside the whole-box argmin of
    // the zero limit (containment is one-sided)
    FunctionSequence flat;
    flat.k_max = 32;
    flat.generator = [](int k) {
        return make_1d("flat", [k](double x) { return ExtReal(x * x / k); });
    };
    auto zero = make_1d("zero", [](double) { return ExtReal(0.0); });
    CHECK(argmin_convergence_check(flat, zero, grid, ctol).holds());
}

TEST_CASE("argmin containment pairs with epi-convergence on catalog sequences") {
    Box grid({-1.0}, {1.0}, 21);
    for (const auto* name : {"quadratic1d", "abs", "wshape"}) {
        const TestFunction& f = catalog_get(name);
        FunctionSequence seq;
        seq.k_max = 32;
        seq.generator = [&f](int k) {
            TestFunction g = f;
            g.eval = [&f, k](const Vec& x) {
                return ext_add(f.eval(x), ExtReal(1.0 / k));
            };
            return g;
        };
        auto epi = epi_converges(seq, f, grid, 0.1, 0.25);
        CHECK(epi.holds());
        if (epi.holds())
            CHECK(argmin_convergence_check(seq, f, grid, 0.2).holds());
    }
}
