/// Command-line driver: mode/tensor construction with caching, trajectory
/// simulation with CSV output, equilibrium stability reports, and inertia/zeta
/// sweep atlases.

#include "cavityflow/io/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Spectral-Galerkin simulator for a fluid-filled rigid body with Navier slip"};
    app.require_subcommand(1);

    cavityflow::CliOptions opts;
    std::uint64_t seed_value = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "run configuration file")->required();
        sub->add_option("--cache-dir", opts.cache_dir, "mode/tensor cache directory");
        sub->add_option("--out", opts.out_path, "output file path");
        sub->add_option("--seed", seed_value, "override the random-preset seed")
            ->each([&](const std::string&) { seed_given = true; });
    };

    CLI::App* modes = app.add_subcommand("modes", "build Stokes modes and coupling tensors into the cache");
    CLI::App* simulate = app.add_subcommand("simulate", "integrate a trajectory and write the sample CSV");
    CLI::App* stability = app.add_subcommand("stability", "classify the equilibria of the configured inertia");
    CLI::App* atlas = app.add_subcommand("atlas", "stability classification over an inertia/zeta sweep");
    for (CLI::App* sub : {modes, simulate, stability, atlas}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return cavityflow::kExitConfigError;
    }

    if (opts.cache_dir.empty()) {
        if (const char* env = std::getenv("CAVITYFLOW_CACHE_DIR")) opts.cache_dir = env;
    }
    if (seed_given) opts.seed = seed_value;

    if (modes->parsed()) return cavityflow::run_modes(opts, std::cout);
    if (simulate->parsed()) return cavityflow::run_simulate(opts, std::cout);
    if (stability->parsed()) return cavityflow::run_stability(opts, std::cout);
    return cavityflow::run_atlas(opts, std::cout);
}
