// Command-line front end: optimize | simulate | detect | minsize.

#include <iostream>

#include <CLI11.hpp>

#include "sandwich/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Sandwich-attack economics, sequencer co-inclusion models, and swap-event "
                 "detection heuristics"};
    app.require_subcommand(1);

    sandwich::io::OptimizeArgs optimize;
    double slippage_tolerance = -1.0;
    CLI::App* opt = app.add_subcommand("optimize", "Optimal frontrun sizing for a scenario + pool");
    opt->add_option("--scenario", optimize.scenario_path, "Scenario JSON")->required();
    opt->add_option("--pool", optimize.pool_path, "Pool snapshot JSON")->required();
    opt->add_option("--out", optimize.out_dir, "Output directory for report.json");
    opt->add_option("--tolerance", slippage_tolerance,
                    "Victim slippage tolerance; derives the frontrun cap when set");

    sandwich::io::SimulateArgs simulate;
    CLI::App* sim = app.add_subcommand("simulate", "Analytic + Monte Carlo co-inclusion");
    sim->add_option("--config", simulate.config_path, "Sequencer config JSON")->required();
    sim->add_option("--strategy", simulate.strategy_path, "Attacker strategy JSON")->required();
    sim->add_option("--trials", simulate.trials, "Monte Carlo trials");
    sim->add_option("--seed", simulate.seed, "Random seed");
    sim->add_option("--threads", simulate.threads, "Worker threads");
    sim->add_option("--out", simulate.out_dir, "Output directory");
    sim->add_flag("--sweep", simulate.sweep, "Also write the documented parameter sweep CSV");

    sandwich::io::DetectArgs detect;
    CLI::App* det = app.add_subcommand("detect", "Sandwich-pattern detection over swap events");
    det->add_option("--events", detect.events_path, "Swap events CSV or JSON-lines")->required();
    det->add_option("--registry", detect.registry_path, "Actor registry JSON");
    det->add_option("--snapshots", detect.snapshots_path, "Pool liquidity snapshots JSON");
    det->add_option("--tx-counts", detect.tx_counts_path, "Per-actor activity CSV");
    det->add_option("--out", detect.out_dir, "Output directory")->required();
    det->add_option("--tolerance", detect.tolerance, "Strong-signature relative tolerance");
    det->add_option("--gas-default", detect.default_gas_cost,
                    "Gas per triple when legs carry no gas data (USD)");

    sandwich::io::MinsizeArgs minsize;
    CLI::App* min = app.add_subcommand("minsize", "Minimum viable victim size over a grid");
    min->add_option("--config", minsize.config_path, "Grid JSON (depths, probs, costs)");
    min->add_option("--out", minsize.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sandwich::io::kExitValidation;
    }

    if (opt->parsed()) {
        if (slippage_tolerance > 0.0) optimize.slippage_tolerance = slippage_tolerance;
        return sandwich::io::cmd_optimize(optimize, std::cout, std::cerr);
    }
    if (sim->parsed()) return sandwich::io::cmd_simulate(simulate, std::cout, std::cerr);
    if (det->parsed()) return sandwich::io::cmd_detect(detect, std::cout, std::cerr);
    if (min->parsed()) return sandwich::io::cmd_minsize(minsize, std::cout, std::cerr);
    return sandwich::io::kExitValidation;
}
