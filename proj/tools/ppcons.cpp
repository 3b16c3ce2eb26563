#include "ppcons/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace ppcons::cli;

    CLI::App app{"Plug-and-play consensus certificates and simulation"};
    app.require_subcommand(1);

    CertifyArgs certify;
    auto* c = app.add_subcommand("certify", "check the local plug-in conditions of a scenario");
    c->add_option("scenario", certify.scenario, "scenario JSON file")->required();
    c->add_flag("--json", certify.json, "print the report as JSON");
    c->add_flag("--table", certify.table, "print the report as a table (default)");
    c->add_flag("--oracle-only", certify.oracle_only, "decide from the eigenvalue oracle alone");
    c->add_option("-o,--out", certify.out_file, "also write the JSON report to this file");

    SimulateArgs simulate;
    auto* s = app.add_subcommand("simulate", "integrate a scenario and write trajectory.csv/.json");
    s->add_option("scenario", simulate.scenario, "scenario JSON file")->required();
    s->add_option("--seed", simulate.seed, "override the noise seed");
    s->add_option("--noise-scale", simulate.noise_scale, "override the noise scale");
    s->add_option("--out-dir", simulate.out_dir, "output directory (default: scenario, then $PPCONS_OUTPUT_DIR, then .)");
    s->add_option("--sweep", simulate.sweep, "run this many consecutive seeds concurrently")->check(CLI::PositiveNumber);

    ReportArgs report;
    auto* r = app.add_subcommand("report", "estimate (rho, sigma) from a trajectory");
    r->add_option("scenario", report.scenario, "scenario JSON file")->required();
    r->add_option("trajectory", report.trajectory, "trajectory CSV written by simulate")->required();
    r->add_option("--out-dir", report.out_dir, "output directory");
    r->add_option("--horizons", report.horizons, "number of log-spaced horizons")->check(CLI::Range(2, 100000));

    std::optional<std::string> example_out;
    auto* e = app.add_subcommand("example", "write the bundled two-network scenario");
    e->add_option("-o,--out", example_out, "output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    if (c->parsed()) return cmd_certify(certify, std::cout, std::cerr);
    if (s->parsed()) return cmd_simulate(simulate, std::cout, std::cerr);
    if (r->parsed()) return cmd_report(report, std::cout, std::cerr);
    return cmd_example(example_out, std::cout, std::cerr);
}
