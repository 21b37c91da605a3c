#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "varconvex/commands.hpp"

using namespace varconvex;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("varconvex_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string manifest_dir() {
    return std::string(VARCONVEX_SOURCE_DIR) + "/manifests";
}

}  // namespace

TEST_CASE("schema checker: subset semantics") {
    json schema = json::parse(R"({
        "type": "object",
        "required": ["a", "b"],
        "properties": {
            "a": {"type": "number"},
            "b": {"type": "array", "items": {"type": "string"}},
            "c": {"type": ["number", "null"]},
            "v": {"enum": ["x", "y"]}
        }
    })");
    std::string err;
    CHECK(schema_validate(json{{"a", 1.5}, {"b", {"s"}}}, schema, &err));
    CHECK(schema_validate(json{{"a", 1.5}, {"b", json::array()}, {"c", nullptr}},
                          schema, &err));
    CHECK_FALSE(schema_validate(json{{"a", 1.5}}, schema, &err));
    CHECK(err.find("missing required") != std::string::npos);
    CHECK_FALSE(schema_validate(json{{"a", "no"}, {"b", json::array()}}, schema,
                                &err));
    CHECK_FALSE(schema_validate(
        json{{"a", 1.0}, {"b", {"s"}}, {"v", "z"}}, schema, &err));
}

TEST_CASE("graph sample JSONL round trip") {
    const auto& f = catalog_get("wshape");
    auto space = make_pnorm_space(1, 2.0);
    auto window = make_window(f, {0.0}, {0.0}, 0.25, 0.25, 0.05);
    Box grid = ball_box({0.0}, 0.25, 21);
    Box dual = ball_box({0.0}, 0.25, 21);
    auto sample = sample_graph(f, space, window, grid, dual);
    std::string text = to_jsonl(sample);
    auto back = graph_sample_from_jsonl(text);
    REQUIRE(back.entries.size() == sample.entries.size());
    for (std::size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].x == sample.entries[i].x);
        CHECK(back.entries[i].xstar == sample.entries[i].xstar);
        CHECK(back.entries[i].fx == sample.entries[i].fx);
    }
    CHECK(back.provenance == sample.provenance);
}

TEST_CASE("CSV writer follows RFC 4180") {
    CsvWriter csv({"a", "b"});
    csv.append_row({json(1.5), json("plain")});
    csv.append_row({json("with,comma"), json("with\"quote")});
    std::string expect =
        "a,b\r\n"
        "1.5,plain\r\n"
        "\"with,comma\",\"with\"\"quote\"\r\n";
    CHECK(csv.text() == expect);
}

TEST_CASE("cmd_envelope writes schema-valid outputs and flags unbounded") {
    RunConfig cfg;
    cfg.function = "quadratic1d";
    cfg.x = {2.0};
    cfg.xstar = {0.0};
    cfg.dim = 1;
    cfg.lambda_ladder = {1.0};
    cfg.output_dir = temp_dir("env").string();
    CHECK(cmd_envelope(cfg) == kExitOk);
    json out = json::parse(read_text_file(cfg.output_dir + "/envelope.json"));
    CHECK(out["records"][0]["value"].get<double>() ==
          Catch::Approx(1.0).margin(1e-8));
    std::string csv = read_text_file(cfg.output_dir + "/envelope.csv");
    CHECK(csv.find("\r\n") != std::string::npos);

    RunConfig neg = cfg;
    neg.function = "neg_quadratic";
    neg.x = {0.0};
    neg.lambda_ladder = {2.0};
    neg.output_dir = temp_dir("env_unbounded").string();
    CHECK(cmd_envelope(neg) == kExitUnbounded);
    json out2 = json::parse(read_text_file(neg.output_dir + "/envelope.json"));
    CHECK(out2["records"][0]["value"].get<std::string>() == "unbounded");

    RunConfig bad = cfg;
    bad.function = "not_a_function";
    std::ostringstream err;
    CHECK(cmd_envelope(bad, err) == kExitUsage);
    CHECK(err.str().find("unknown catalog function") != std::string::npos);
}

TEST_CASE("cmd_certify: exit codes and byte-identical reruns") {
    RunConfig cfg;
    cfg.function = "wshape";
    cfg.x = {0.0};
    cfg.xstar = {0.0};
    cfg.dim = 1;
    cfg.output_dir = temp_dir("cert_a").string();
    CHECK(cmd_certify(cfg) == kExitOk);

    RunConfig cfg2 = cfg;
    cfg2.output_dir = temp_dir("cert_b").string();
    CHECK(cmd_certify(cfg2) == kExitOk);
    CHECK(read_text_file(cfg.output_dir + "/matrix.json") ==
          read_text_file(cfg2.output_dir + "/matrix.json"));
    CHECK(read_text_file(cfg.output_dir + "/matrix.md") ==
          read_text_file(cfg2.output_dir + "/matrix.md"));

    json out = json::parse(read_text_file(cfg.output_dir + "/matrix.json"));
    CHECK(out["consistent"].get<bool>());

    RunConfig cubic = cfg;
    cubic.function = "cubic";
    cubic.output_dir = temp_dir("cert_cubic").string();
    CHECK(cmd_certify(cubic) == kExitOk);  // inconsistency-free failure pattern
}

TEST_CASE("cmd_certify flags a forced inconsistency") {
    // corrupt the verdict joining by injecting an impossible edge pattern:
    // this goes through the library surface by certifying at a point where
    // the precondition filter is bypassed via a doctored matrix
    EquivalenceMatrix m;
    m.function = "synthetic";
    m.xbar = {0.0};
    m.xbarstar = {0.0};
    m.vc_definition = Certificate::pass("vc_definition");
    m.subgradient_inequality =
        Certificate::fail("subgradient_inequality", {{"x", {0.0}}});
    m.local_max_monotone = Certificate::pass("local_max_monotone");
    m.local_monotone = Certificate::pass("local_monotone");
    m.envelope_convexity = Certificate::pass("envelope_convexity");
    m.consistent = detail::edges_consistent(m, nullptr);
    CHECK_FALSE(m.consistent);
}

TEST_CASE("cmd_space_check and cmd_epi produce expected exit codes") {
    auto out = temp_dir("space").string();
    CHECK(cmd_space_check(1.5, 2, 500, 2000, 7, out) == kExitOk);
    json j = json::parse(read_text_file(out + "/space_check.json"));
    CHECK(j["geometry"]["lwp_constant"].get<double>() == Catch::Approx(0.5));
    std::ostringstream err;
    CHECK(cmd_space_check(0.5, 2, 100, 1000, 7, out, err) == kExitUsage);

    auto epi_out = temp_dir("epi").string();
    CHECK(cmd_epi(manifest_dir() + "/uniform_shift.json", epi_out) == kExitOk);
    CHECK(cmd_epi(manifest_dir() + "/oscillating_sets.json", epi_out) == kExitOk);
    std::ostringstream err2;
    CHECK(cmd_epi(manifest_dir() + "/does_not_exist.json", epi_out, err2) ==
          kExitUsage);
    json osc = json::parse(read_text_file(epi_out + "/epi_oscillating_sets.json"));
    CHECK_FALSE(osc["results"]["inner_equals_outer"].get<bool>());
}

TEST_CASE("catalog descriptors validate against the shipped schema") {
    json j = json::array();
    for (const auto& f : catalog()) j.push_back(catalog_descriptor(f));
    std::string err;
    json schema = json::parse(read_text_file(
        std::string(VARCONVEX_SOURCE_DIR) + "/schemas/catalog.schema.json"));
    CHECK(schema_validate(j, schema, &err));
}

TEST_CASE("run config JSON round trip and validation") {
    RunConfig cfg;
    cfg.function = "quad2d";
    cfg.x = {0.0, 0.0};
    cfg.xstar = {0.0, 0.0};
    cfg.dim = 2;
    json j = to_json(cfg);
    std::string err;
    json schema = json::parse(read_text_file(
        std::string(VARCONVEX_SOURCE_DIR) + "/schemas/run_config.schema.json"));
    CHECK(schema_validate(j, schema, &err));
    RunConfig back = run_config_from_json(j);
    CHECK(back.function == cfg.function);
    CHECK(back.x == cfg.x);
    CHECK(back.dim == 2);
    CHECK_NOTHROW(validate(back));

    RunConfig bad = cfg;
    bad.p = 1.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.function = "indicator_interval";
    bad.dim = 1;
    bad.x = {1.5};
    bad.xstar = {0.0};
    CHECK_NOTHROW(validate(bad));  // envelope/prox allowed outside the domain
    CHECK_THROWS_AS(validate_certify_center(bad), ConfigError);
}

TEST_CASE("prox command projects from outside the domain") {
    RunConfig cfg;
    cfg.function = "indicator_interval";
    cfg.x = {5.0};
    cfg.xstar = {0.0};
    cfg.dim = 1;
    cfg.lambda_ladder = {1.0};
    cfg.output_dir = temp_dir("prox_outside").string();
    CHECK(cmd_prox(cfg) == kExitOk);
    json out = json::parse(read_text_file(cfg.output_dir + "/prox.json"));
    REQUIRE(out["records"][0]["minimizers"].size() == 1);
    CHECK(out["records"][0]["minimizers"][0][0].get<double>() ==
          Catch::Approx(1.0).margin(1e-8));
    // certify at the same point is a config error
    std::ostringstream err;
    CHECK(cmd_certify(cfg, err) == kExitUsage);
}
