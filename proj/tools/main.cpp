#include "commands.hpp"
#include "config.hpp"

#include "lwi/errors.hpp"
#include "lwi/log.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"lwi: liquidity withdrawal index pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Run configuration file (INI)");
    int64_t seed_override = -1;
    app.add_option("--seed", seed_override, "Override the config seed");
    int jobs_override = 0;
    app.add_option("--jobs", jobs_override, "Parallel symbol workers");
    std::string out_override;
    app.add_option("--out", out_override, "Override the output directory");

    auto* synth = app.add_subcommand("synth", "Generate synthetic MBO streams");
    auto* build = app.add_subcommand("build", "Ingest, resample and build feature frames");
    auto* screen = app.add_subcommand("screen", "Rank features and build the consensus table");
    auto* eval = app.add_subcommand("eval", "Walk-forward evaluation of AR/HAR/GBT");
    auto* diag = app.add_subcommand("diag", "Stationarity and autocorrelation diagnostics");
    auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (defaults->parsed()) return lwi::cli::cmd_defaults();

        lwi::cli::RunConfig cfg;
        if (!config_path.empty()) cfg = lwi::cli::parse_config_file(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
        if (jobs_override > 0) cfg.jobs = jobs_override;
        if (!out_override.empty()) cfg.out_dir = out_override;

        if (synth->parsed()) return lwi::cli::cmd_synth(cfg);
        if (build->parsed()) return lwi::cli::cmd_build(cfg);
        if (screen->parsed()) return lwi::cli::cmd_screen(cfg);
        if (eval->parsed()) return lwi::cli::cmd_eval(cfg);
        if (diag->parsed()) return lwi::cli::cmd_diag(cfg);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const lwi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const lwi::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
