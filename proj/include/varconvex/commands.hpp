#pragma once

#include <filesystem>
#include <iostream>

#include "varconvex/json_io.hpp"
#include "varconvex/run_config.hpp"
#include "varconvex/schema_check.hpp"
#include "varconvex/sequence_registry.hpp"

namespace varconvex {

// Exit-code contract (frozen): 0 ok, 1 usage/config error, 2 unbounded
// envelope encountered, 3 inconsistent equivalence matrix.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitUnbounded = 2;
inline constexpr int kExitInconsistent = 3;

namespace detail {

inline std::string schema_dir() {
    if (const char* env = std::getenv("VARCONVEX_SCHEMA_DIR")) return env;
#ifdef VARCONVEX_SOURCE_DIR
    return std::string(VARCONVEX_SOURCE_DIR) + "/schemas";
#else
    return "schemas";
#endif
}

inline void check_against_schema(const json& value, const std::string& name) {
    std::string path = schema_dir() + "/" + name;
    std::string err;
    json schema = json::parse(read_text_file(path));
    if (!schema_validate(value, schema, &err))
        throw std::runtime_error("output failed schema " + name + ": " + err);
}

inline void ensure_dir(const std::string& dir) {
    std::filesystem::create_directories(dir);
}

inline Box search_box_for(const RunConfig& c) {
    int pts = c.search_points ? c.search_points : (c.dim >= 2 ? 41 : 1601);
    return ball_box(Vec(c.dim, 0.0), c.search_halfwidth, pts);
}

}  // namespace detail

/// Envelope ladder at the configured point: one record per lambda, CSV and
/// schema-checked JSON. Exit 2 when any evaluation is unbounded.
inline int cmd_envelope(const RunConfig& cfg, std::ostream& err = std::cerr) {
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    const auto& f = catalog_get(cfg.function);
    auto space = cfg.space();
    Box search = detail::search_box_for(cfg);
    bool any_unbounded = false;

    std::vector<double> ladder = cfg.lambda_ladder;
    std::sort(ladder.begin(), ladder.end());
    std::vector<EnvelopeResult> results(ladder.size());
    parallel_for(ladder.size(), [&](std::size_t i) {
        results[i] = envelope(f, space, ladder[i], cfg.x, cfg.xstar, search);
    });

    json out;
    out["function"] = cfg.function;
    out["space"] = {{"p", cfg.p}, {"dim", cfg.dim}};
    out["seed"] = cfg.seed;
    out["records"] = json::array();
    CsvWriter csv({"lambda", "value"});
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto& r = results[i];
        any_unbounded = any_unbounded || r.unbounded;
        out["records"].push_back(to_json(r, cfg.x));
        csv.append_row({json(ladder[i]),
                        r.unbounded ? json("unbounded") : json(r.value.raw())});
    }
    detail::check_against_schema(out, "envelope_run.schema.json");
    detail::ensure_dir(cfg.output_dir);
    write_text_file(cfg.output_dir + "/envelope.json", out.dump(2) + "\n");
    write_text_file(cfg.output_dir + "/envelope.csv", csv.text());
    return any_unbounded ? kExitUnbounded : kExitOk;
}

/// Proximal mapping at the configured point per lambda.
inline int cmd_prox(const RunConfig& cfg, std::ostream& err = std::cerr) {
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    const auto& f = catalog_get(cfg.function);
    auto space = cfg.space();
    Box search = detail::search_box_for(cfg);
    bool any_unbounded = false;
    json out;
    out["function"] = cfg.function;
    out["space"] = {{"p", cfg.p}, {"dim", cfg.dim}};
    out["seed"] = cfg.seed;
    out["records"] = json::array();
    for (double lambda : cfg.lambda_ladder) {
        EnvelopeResult r = envelope(f, space, lambda, cfg.x, cfg.xstar, search);
        any_unbounded = any_unbounded || r.unbounded;
        out["records"].push_back(to_json(r, cfg.x));
    }
    detail::check_against_schema(out, "envelope_run.schema.json");
    detail::ensure_dir(cfg.output_dir);
    write_text_file(cfg.output_dir + "/prox.json", out.dump(2) + "\n");
    return any_unbounded ? kExitUnbounded : kExitOk;
}

/// Equivalence matrix at the configured point: JSON + Markdown summary.
/// Exit 3 when the matrix is inconsistent.
inline int cmd_certify(const RunConfig& cfg, std::ostream& err = std::cerr) {
    try {
        validate(cfg);
        validate_certify_center(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    const auto& f = catalog_get(cfg.function);
    auto space = cfg.space();
    MatrixConfig mc;
    mc.radius_x = cfg.radius_x;
    mc.radius_dual = cfg.radius_dual;
    mc.eps_value = cfg.eps_value;
    mc.lambda_ladder = cfg.lambda_ladder;
    if (cfg.points_per_axis) {
        mc.points_per_axis_1d = cfg.points_per_axis;
        mc.points_per_axis_2d = cfg.points_per_axis;
    }
    EquivalenceMatrix m;
    try {
        m = equivalence_matrix(f, space, cfg.x, cfg.xstar, mc);
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    json out = to_json(m);
    out["seed"] = cfg.seed;
    detail::check_against_schema(out, "equivalence_matrix.schema.json");
    detail::ensure_dir(cfg.output_dir);
    write_text_file(cfg.output_dir + "/matrix.json", out.dump(2) + "\n");
    write_text_file(cfg.output_dir + "/matrix.md", matrix_markdown({m}));
    return m.consistent ? kExitOk : kExitInconsistent;
}

/// Space geometry report: duality identities, moduli CSV + JSON,
/// parallelogram-law certificates, empirical J continuity.
inline int cmd_space_check(double p, int dim, int trials, int samples,
                           long long seed, const std::string& output_dir,
                           std::ostream& err = std::cerr) {
    PNormSpace space;
    try {
        space = make_pnorm_space(dim, p);
        if (dim < 2) throw std::invalid_argument("space-check needs dim >= 2");
        if (samples < 100) throw std::invalid_argument("samples must be >= 100");
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    GeometryReport rep = estimate_moduli(space, samples, seed);
    // known sharp constants: c = p - 1 on the appropriate side
    if (p <= 2.0) {
        auto lwp = check_parallelogram_law(space, p - 1.0, true, trials, seed);
        if (lwp.holds()) rep.lwp_constant = p - 1.0;
    }
    if (p >= 2.0) {
        auto uwp = check_parallelogram_law(space, p - 1.0, false, trials, seed);
        if (uwp.holds()) rep.uwp_constant = p - 1.0;
    }
    json geometry = to_json(rep);
    detail::check_against_schema(geometry, "geometry_report.schema.json");

    json out;
    out["geometry"] = geometry;
    out["duality_map_continuity"] = json::array();
    for (auto [delta, jump] : duality_map_continuity_table(
             space, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}, 200, seed))
        out["duality_map_continuity"].push_back({delta, jump});
    detail::ensure_dir(output_dir);
    write_text_file(output_dir + "/space_check.json", out.dump(2) + "\n");
    CsvWriter csv({"t", "modulus_convexity"});
    for (auto [t, xi] : rep.sampled_modulus_convexity)
        csv.append_row({json(t), json(xi)});
    write_text_file(output_dir + "/moduli.csv", csv.text());
    return kExitOk;
}

/// Runs one epi-convergence manifest; exit 0 iff its expectation is met.
inline int cmd_epi(const std::string& manifest_path,
                   const std::string& output_dir,
                   std::ostream& err = std::cerr) {
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path));
        std::string schema_err;
        json schema = json::parse(
            read_text_file(detail::schema_dir() + "/epi_manifest.schema.json"));
        if (!schema_validate(manifest, schema, &schema_err))
            throw std::runtime_error("manifest invalid: " + schema_err);
    } catch (const std::exception& e) {
        err << "manifest error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::string kind = manifest["kind"].get<std::string>();
    Box box(manifest["box"]["lo"].get<Vec>(), manifest["box"]["hi"].get<Vec>(),
            manifest["box"]["points_per_axis"].get<int>());
    int k_max = manifest["k_max"].get<int>();
    double cluster_tol = manifest.value("cluster_tol", 2.0 * box.max_spacing());

    json out;
    out["manifest"] = manifest["name"].get<std::string>();
    out["kind"] = kind;
    out["results"] = json::object();
    bool expected_met = true;

    if (kind == "function_sequence") {
        SequenceSpec spec;
        try {
            spec = make_function_sequence(
                manifest["generator_id"].get<std::string>(), k_max, box);
        } catch (const std::invalid_argument& e) {
            err << "manifest error: " << e.what() << "\n";
            return kExitUsage;
        }
        double tol = manifest.value("tol", 0.1);
        double r0 = manifest.value("r0", 1.0);
        Certificate epi = epi_converges(spec.sequence, spec.limit, box, tol, r0);
        Certificate usc =
            inf_upper_semicontinuity_check(spec.sequence, spec.limit, box, tol);
        usc.notes.push_back("epi-convergence verdict: " +
                            std::string(to_string(epi.verdict)));
        Certificate argmin =
            argmin_convergence_check(spec.sequence, spec.limit, box, cluster_tol);
        out["results"]["epi_convergence"] = to_json(epi);
        out["results"]["inf_upper_semicontinuity"] = to_json(usc);
        out["results"]["argmin_convergence"] = to_json(argmin);
        bool expect_holds =
            manifest.contains("expect") && manifest["expect"].contains("epi_holds")
                ? manifest["expect"]["epi_holds"].get<bool>()
                : true;
        expected_met = (epi.holds() == expect_holds) && usc.holds() &&
                       argmin.holds();
    } else {
        auto seq = make_point_set_sequence(
            manifest["generator_id"].get<std::string>(), k_max);
        auto outer = set_outer_limit(seq, cluster_tol);
        auto inner = set_inner_limit(seq, cluster_tol);
        out["results"]["outer_limit"] = outer;
        out["results"]["inner_limit"] = inner;
        bool equal = outer.size() == inner.size();
        for (const auto& p : inner) {
            bool found = false;
            for (const auto& q : outer)
                if (dist_inf(p, q) <= cluster_tol) found = true;
            equal = equal && found;
        }
        out["results"]["inner_equals_outer"] = equal;
        bool expect_equal =
            manifest.contains("expect") &&
                    manifest["expect"].contains("inner_equals_outer")
                ? manifest["expect"]["inner_equals_outer"].get<bool>()
                : true;
        expected_met = (equal == expect_equal);
    }

    out["expected_met"] = expected_met;
    detail::check_against_schema(out, "epi_suite.schema.json");
    detail::ensure_dir(output_dir);
    write_text_file(output_dir + "/epi_" +
                        manifest["name"].get<std::string>() + ".json",
                    out.dump(2) + "\n");
    return expected_met ? kExitOk : kExitUsage;
}

inline int cmd_catalog_list(std::ostream& out = std::cout) {
    json j = json::array();
    for (const auto& f : catalog()) j.push_back(catalog_descriptor(f));
    detail::check_against_schema(j, "catalog.schema.json");
    out << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace varconvex
