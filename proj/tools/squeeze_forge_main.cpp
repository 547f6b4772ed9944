#include "squeeze_forge/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App* cmd, sqf::RunConfig& cfg) {
    cmd->add_option("--n", cfg.n, "Real dimension of the domain")->capture_default_str();
    cmd->add_option("--grid", cfg.grid, "Curvature sweep resolution")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Seed for randomized checks");
    cmd->add_option("--out", cfg.out, "Output path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Glued sphere-graph domains: schedules, verification suites and squeezing certificates"};
    app.require_subcommand(1);
    sqf::RunConfig cfg;

    auto* build = app.add_subcommand("build", "Search gluing radii and write the schedule JSON");
    add_common(build, cfg);
    build->add_option("--k0", cfg.k0, "First sphere index")->capture_default_str();
    build->add_option("--depth", cfg.depth, "Number of gluing stages")->capture_default_str();
    build->add_option("--m", cfg.m, "Pinching margin (searched when omitted)");

    auto* verify = app.add_subcommand("verify", "Run all verification suites on a schedule");
    add_common(verify, cfg);
    verify->add_option("--schedule", cfg.schedule, "Schedule JSON")->required();
    verify->add_option("--pairs", cfg.pairs, "Convexity midpoint pairs")->capture_default_str();
    verify->add_option("--samples", cfg.samples, "Samples per tangent-ball check")->capture_default_str();

    auto* cert = app.add_subcommand("certificate", "Verify a schedule and emit the squeezing certificate");
    add_common(cert, cfg);
    cert->add_option("--schedule", cfg.schedule, "Schedule JSON")->required();
    cert->add_option("--pairs", cfg.pairs, "Convexity midpoint pairs")->capture_default_str();
    cert->add_option("--samples", cfg.samples, "Samples per tangent-ball check")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sqf::kExitConfig;
    }
    if (build->parsed()) return sqf::cmd_build(cfg, std::cerr);
    if (verify->parsed()) return sqf::cmd_verify(cfg, std::cerr);
    return sqf::cmd_certificate(cfg, std::cerr);
}
