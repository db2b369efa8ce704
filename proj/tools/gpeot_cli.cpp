#include "gpeot/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace gpeot;

    CLI::App app{"Extended-object tracking with Gaussian-process extent models"};
    app.require_subcommand(1);

    cli::Overrides ov;
    std::string config, out, tracker;
    std::uint64_t seed = 0;
    int mc_runs = 0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "Run configuration (JSON)")->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Master seed");
        cmd->add_option("--out", out, "Output directory");
        cmd->add_option("--tracker", tracker, "Tracker")->check(CLI::IsMember({"gpeot", "gpeot_p"}));
        cmd->add_option("--mc-runs", mc_runs, "Number of Monte-Carlo runs")->check(CLI::PositiveNumber);
    };
    CLI::App* simulate = app.add_subcommand("simulate", "Generate truth and measurement files");
    CLI::App* track = app.add_subcommand("track", "Run a tracker on the measurement files");
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score estimates against the truth");
    CLI::App* run_all = app.add_subcommand("run-all", "simulate, track and evaluate");
    for (CLI::App* cmd : {simulate, track, evaluate, run_all}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    CLI::App* cmd = app.get_subcommands().front();
    if (cmd->count("--config") > 0) ov.config_path = config;
    if (cmd->count("--seed") > 0) ov.seed = seed;
    if (cmd->count("--out") > 0) ov.out_dir = out;
    if (cmd->count("--tracker") > 0) ov.tracker = tracker;
    if (cmd->count("--mc-runs") > 0) ov.mc_runs = mc_runs;

    try {
        const io::RunConfig cfg = cli::resolve_config(ov);
        if (cmd == simulate) {
            cli::cmd_simulate(cfg, std::cout);
        } else if (cmd == track) {
            cli::cmd_track(cfg, std::cout);
        } else if (cmd == evaluate) {
            cli::cmd_evaluate(cfg, std::cout);
        } else {
            cli::cmd_run_all(cfg, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
