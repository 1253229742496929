#pragma once

#include "config.hpp"

namespace lwi::cli {

// Subcommand bodies. Each validates the config fully before touching any
// output path, prints a short summary to stdout, and throws on failure
// (ConfigError -> exit 1, DataError -> 2, anything else -> 3).
int cmd_synth(const RunConfig& cfg);
int cmd_build(const RunConfig& cfg);
int cmd_screen(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_diag(const RunConfig& cfg);
int cmd_defaults();

} // namespace lwi::cli
