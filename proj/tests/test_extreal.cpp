#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "varconvex/extreal.hpp"

using namespace varconvex;

TEST_CASE("ext_add saturates at +inf") {
    CHECK(ext_add(ExtReal(2.0), ExtReal(3.0)) == ExtReal(5.0));
    CHECK(ext_add(ExtReal(2.0), ExtReal::infinity()) == ExtReal::infinity());
    CHECK(ext_add(ExtReal::infinity(), ExtReal::infinity()) == ExtReal::infinity());
}

TEST_CASE("ExtReal rejects NaN and -inf") {
    CHECK_THROWS(ExtReal(std::nan("")));
    CHECK_THROWS(ExtReal(-std::numeric_limits<double>::infinity()));
    CHECK_THROWS(ext_scale(-1.0, ExtReal::infinity()));
    CHECK(ext_scale(2.0, ExtReal::infinity()) == ExtReal::infinity());
    CHECK(ext_scale(-3.0, ExtReal(2.0)) == ExtReal(-6.0));
}

TEST_CASE("finite addition matches double addition exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e8, 1e8);
    for (int i = 0; i < 2000; ++i) {
        double a = u(rng), b = u(rng);
        CHECK(ext_add(ExtReal(a), ExtReal(b)).value() == a + b);
    }
}

TEST_CASE("ordering is total and transitive on sampled triples") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    auto draw = [&]() {
        double x = u(rng);
        return x > 9.0 ? ExtReal::infinity() : ExtReal(x);
    };
    for (int i = 0; i < 2000; ++i) {
        ExtReal a = draw(), b = draw(), c = draw();
        // totality
        CHECK((a < b || b < a || a == b));
        // transitivity
        if (a <= b && b <= c) CHECK(a <= c);
        // every finite value below +inf
        if (a.finite()) CHECK(a < ExtReal::infinity());
    }
}
