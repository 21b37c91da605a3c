#pragma once

#include <string>

#include "varconvex/catalog.hpp"
#include "varconvex/certificate.hpp"
#include "varconvex/pnorm_space.hpp"

namespace varconvex {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One run of the laboratory: the function, the graph point, the space, the
/// window and grid overrides, and the seed that pins all randomized sampling.
struct RunConfig {
    std::string function = "wshape";
    Vec x = {0.0};
    Vec xstar = {0.0};
    double p = 2.0;
    int dim = 1;
    double radius_x = 0.25;
    double radius_dual = 0.25;
    double eps_value = 0.05;
    std::vector<double> lambda_ladder = {0.4, 0.2, 0.1, 0.05};
    int points_per_axis = 0;  // 0: dimension default
    double search_halfwidth = 8.0;
    int search_points = 0;  // 0: dimension default
    std::string output_dir = "out";
    long long seed = 20240801;

    PNormSpace space() const { return make_pnorm_space(dim, p); }
};

inline RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    if (j.contains("function")) c.function = j["function"].get<std::string>();
    if (j.contains("point")) {
        c.x = j["point"]["x"].get<Vec>();
        c.xstar = j["point"]["xstar"].get<Vec>();
    }
    if (j.contains("space")) {
        c.p = j["space"]["p"].get<double>();
        c.dim = j["space"]["dim"].get<int>();
    } else {
        c.dim = static_cast<int>(c.x.size());
    }
    if (j.contains("window")) {
        const auto& w = j["window"];
        if (w.contains("radius_x")) c.radius_x = w["radius_x"].get<double>();
        if (w.contains("radius_dual")) c.radius_dual = w["radius_dual"].get<double>();
        if (w.contains("eps_value")) c.eps_value = w["eps_value"].get<double>();
    }
    if (j.contains("lambda_ladder"))
        c.lambda_ladder = j["lambda_ladder"].get<std::vector<double>>();
    if (j.contains("grids")) {
        const auto& g = j["grids"];
        if (g.contains("points_per_axis"))
            c.points_per_axis = g["points_per_axis"].get<int>();
        if (g.contains("search_halfwidth"))
            c.search_halfwidth = g["search_halfwidth"].get<double>();
        if (g.contains("search_points"))
            c.search_points = g["search_points"].get<int>();
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<long long>();
    return c;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["function"] = c.function;
    j["point"] = {{"x", c.x}, {"xstar", c.xstar}};
    j["space"] = {{"p", c.p}, {"dim", c.dim}};
    j["window"] = {{"radius_x", c.radius_x},
                   {"radius_dual", c.radius_dual},
                   {"eps_value", c.eps_value}};
    j["lambda_ladder"] = c.lambda_ladder;
    j["grids"] = {{"points_per_axis", c.points_per_axis},
                  {"search_halfwidth", c.search_halfwidth},
                  {"search_points", c.search_points}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

/// Full validation against the catalog and space constraints; throws
/// ConfigError with a diagnostic on the first problem found.
inline void validate(const RunConfig& c) {
    const TestFunction* f = nullptr;
    try {
        f = &catalog_get(c.function);
    } catch (const UnknownFunction& e) {
        throw ConfigError(e.what());
    }
    if (!(c.p > 1.0) || !std::isfinite(c.p))
        throw ConfigError("space.p must lie in (1, inf)");
    if (c.dim != f->dim)
        throw ConfigError("space.dim does not match the catalog function");
    if (static_cast<int>(c.x.size()) != f->dim ||
        static_cast<int>(c.xstar.size()) != f->dim)
        throw ConfigError("point dimensions do not match the function");
    if (c.radius_x <= 0 || c.radius_dual <= 0 || c.eps_value <= 0)
        throw ConfigError("window radii and eps_value must be positive");
    for (double l : c.lambda_ladder)
        if (!(l > 0)) throw ConfigError("lambda ladder entries must be positive");
    if (c.lambda_ladder.empty()) throw ConfigError("lambda ladder is empty");
    if (c.points_per_axis != 0 && c.points_per_axis < 3)
        throw ConfigError("grids.points_per_axis must be >= 3");
    if (c.search_points != 0 && c.search_points < 3)
        throw ConfigError("grids.search_points must be >= 3");
    if (c.search_halfwidth <= 0)
        throw ConfigError("grids.search_halfwidth must be positive");
    if (c.seed < 0) throw ConfigError("seed must be nonnegative");
}

/// Certification additionally needs a finite value at the window center;
/// envelope and prox evaluations do not (projection onto a domain is the
/// standard case).
inline void validate_certify_center(const RunConfig& c) {
    const TestFunction& f = catalog_get(c.function);
    if (!f.eval(c.x).finite())
        throw ConfigError("point.x lies outside the effective domain");
}

}  // namespace varconvex
