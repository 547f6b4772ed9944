#include "squeeze_forge/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Emit the squeezing certificate for a schedule"};
    sqf::RunConfig cfg;
    app.add_option("--schedule", cfg.schedule, "Schedule JSON")->required();
    app.add_option("--samples", cfg.samples, "Samples per tangent-ball check")->capture_default_str();
    app.add_option("--pairs", cfg.pairs, "Convexity midpoint pairs")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for randomized checks");
    app.add_option("--n", cfg.n, "Real dimension of the domain")->capture_default_str();
    app.add_option("--grid", cfg.grid, "Curvature sweep resolution")->capture_default_str();
    app.add_option("--out", cfg.out, "Certificate JSON path")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sqf::kExitConfig;
    }
    return sqf::cmd_certificate(cfg, std::cerr);
}
