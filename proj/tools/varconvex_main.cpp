// Command-line front end for the variational-convexity laboratory.
//
// Subcommands: envelope, prox, certify, space-check, epi, catalog-list.
// Exit codes: 0 ok, 1 usage/config error, 2 unbounded envelope, 3
// inconsistent equivalence matrix.

#include <CLI11.hpp>

#include "varconvex/commands.hpp"

using namespace varconvex;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string function;
    std::vector<double> x, xstar;
    double p = 0.0;
    std::vector<double> ladder;
    double radius_x = 0.0, radius_dual = 0.0, eps_value = 0.0;
    std::string output_dir;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON config file");
    cmd->add_option("--function", a.function, "catalog function name");
    cmd->add_option("--x", a.x, "graph point x");
    cmd->add_option("--xstar", a.xstar, "graph point x* (tilt)");
    cmd->add_option("--p", a.p, "norm exponent, 1 < p < inf");
    cmd->add_option("--lambda", a.ladder, "lambda ladder");
    cmd->add_option("--radius-x", a.radius_x, "window primal radius");
    cmd->add_option("--radius-dual", a.radius_dual, "window dual radius");
    cmd->add_option("--eps-value", a.eps_value, "attentive value threshold");
    cmd->add_option("--output-dir", a.output_dir, "output directory");
    cmd->add_option("--seed", a.seed, "RNG seed");
}

// CLI flags override config-file fields.
RunConfig build_config(const CommonArgs& a) {
    RunConfig cfg;
    if (!a.config_path.empty())
        cfg = run_config_from_json(json::parse(read_text_file(a.config_path)));
    if (!a.function.empty()) cfg.function = a.function;
    if (!a.x.empty()) cfg.x = a.x;
    if (!a.xstar.empty()) cfg.xstar = a.xstar;
    if (a.p > 0.0) cfg.p = a.p;
    if (!a.x.empty() || a.config_path.empty())
        cfg.dim = static_cast<int>(cfg.x.size());
    if (!a.ladder.empty()) cfg.lambda_ladder = a.ladder;
    if (a.radius_x > 0.0) cfg.radius_x = a.radius_x;
    if (a.radius_dual > 0.0) cfg.radius_dual = a.radius_dual;
    if (a.eps_value > 0.0) cfg.eps_value = a.eps_value;
    if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
    if (a.seed >= 0) cfg.seed = a.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for Moreau envelopes and "
                 "variational-convexity certification"};
    app.require_subcommand(1);

    CommonArgs env_args, prox_args, cert_args;
    auto* env_cmd = app.add_subcommand("envelope", "envelope ladder at a point");
    add_common(env_cmd, env_args);
    auto* prox_cmd = app.add_subcommand("prox", "proximal mapping at a point");
    add_common(prox_cmd, prox_args);
    auto* cert_cmd =
        app.add_subcommand("certify", "equivalence matrix at a graph point");
    add_common(cert_cmd, cert_args);

    double sc_p = 2.0;
    int sc_dim = 2, sc_trials = 2000, sc_samples = 4000;
    long long sc_seed = 20240801;
    std::string sc_out = "out";
    auto* space_cmd = app.add_subcommand("space-check", "p-norm geometry report");
    space_cmd->add_option("--p", sc_p, "norm exponent");
    space_cmd->add_option("--dim", sc_dim, "dimension (>= 2)");
    space_cmd->add_option("--trials", sc_trials, "random pairs per law check");
    space_cmd->add_option("--samples", sc_samples, "moduli samples");
    space_cmd->add_option("--seed", sc_seed, "RNG seed");
    space_cmd->add_option("--output-dir", sc_out, "output directory");

    std::vector<std::string> manifests;
    std::string epi_out = "out";
    auto* epi_cmd = app.add_subcommand("epi", "run epi-convergence manifests");
    epi_cmd->add_option("manifests", manifests, "manifest JSON files")
        ->required();
    epi_cmd->add_option("--output-dir", epi_out, "output directory");

    app.add_subcommand("catalog-list", "print the built-in function catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (env_cmd->parsed()) return cmd_envelope(build_config(env_args));
        if (prox_cmd->parsed()) return cmd_prox(build_config(prox_args));
        if (cert_cmd->parsed()) return cmd_certify(build_config(cert_args));
        if (space_cmd->parsed())
            return cmd_space_check(sc_p, sc_dim, sc_trials, sc_samples, sc_seed,
                                   sc_out);
        if (epi_cmd->parsed()) {
            int worst = kExitOk;
            for (const auto& m : manifests)
                worst = std::max(worst, cmd_epi(m, epi_out));
            return worst;
        }
        return cmd_catalog_list();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
