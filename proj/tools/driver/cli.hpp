#pragma once

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "driver/acceptance.hpp"
#include "restriction_lab/parallel.hpp"

namespace restriction_lab::driver {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_resolution = 3, exit_invariant = 4 };

/// `run`: parse, compute, and only then write. Violations still write their
/// evidence before exiting 4.
inline int run_command(const std::string& config_path, const std::string& out_dir) {
    try {
        const auto config = load_config(config_path);
        const auto outcome = run_experiment(config);
        write_all(out_dir, render(outcome, {config.experiment, config.hash}));
        for (const auto& note : outcome.notes) std::printf("%s\n", note.c_str());
        for (const auto& v : outcome.violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
        return outcome.violations.empty() ? exit_ok : exit_invariant;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const resolution_error& e) {
        std::fprintf(stderr, "resolution error: %s\n", e.what());
        return exit_resolution;
    } catch (const invariant_violation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return exit_invariant;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "output error: %s\n", e.what());
        return exit_config;
    }
}

inline int cli_main(int argc, char** argv) {
    CLI::App app{"restriction-lab: numerical experiments on Fourier restriction and radial multipliers"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::string config_path, out_dir, verify_out;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "run one experiment config");
    run->add_option("--config", config_path, "JSON experiment config")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--threads", threads, "worker cap")->check(CLI::Range(1u, 1024u));

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--out", verify_out, "also write the suite's CSV ledgers here");
    verify->add_option("--threads", threads, "worker cap")->check(CLI::Range(1u, 1024u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    if (threads > 0) set_thread_count(threads);
    if (*run) return run_command(config_path, out_dir);
    try {
        return run_verify(verify_out) ? exit_ok : exit_invariant;
    } catch (const resolution_error& e) {
        std::fprintf(stderr, "resolution error: %s\n", e.what());
        return exit_resolution;
    }
}

}  // namespace restriction_lab::driver
