// Command-line front end: solve | wolff | km-trace | verify, each driven
// by a scenario config file.
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "parawolff/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"parawolff: degenerate parabolic solver and potential-estimate verifier"};
    app.require_subcommand(1);

    std::string config_path;
    parawolff::RunOptions opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "scenario config file")->required();
        sub->add_option("--out", opt.out_dir, "output directory (default: config's out_dir)");
        sub->add_option("--rung", opt.rung, "refinement rung index (default: all / finest)");
        sub->add_option("--seed", opt.seed, "seed recorded in outputs (randomized suites only)");
        return sub;
    };

    auto* solve_cmd = add_common(app.add_subcommand("solve", "solve scenarios and dump fields"));
    auto* wolff_cmd = add_common(app.add_subcommand("wolff", "evaluate Wolff potential queries"));
    auto* km_cmd = add_common(app.add_subcommand("km-trace", "emit level-iteration traces"));
    auto* verify_cmd = add_common(app.add_subcommand("verify", "full verification pipeline"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return parawolff::run_solve(config_path, opt);
        if (wolff_cmd->parsed()) return parawolff::run_wolff(config_path, opt);
        if (km_cmd->parsed()) return parawolff::run_kmtrace(config_path, opt);
        if (verify_cmd->parsed()) return parawolff::run_verify(config_path, opt);
    } catch (const parawolff::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
