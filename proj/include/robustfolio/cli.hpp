// SPDX-License-Identifier: MIT
/**
 * @file cli.hpp
 * @brief Commands behind the `robustfolio` executable.
 *
 * robustfolio <command> [figure] --config <path> [--out <path>]
 *             [--format csv|json] [--delta <x> | --delta-grid <a:b:step>]
 *             [--sweep <param>=<a:b:step>] [--threads <n>]
 */
#pragma once

#include <string>
#include <vector>

#include "robustfolio/config.hpp"
#include "robustfolio/result_table.hpp"

namespace robustfolio {

const std::vector<std::string>& commands();
const std::vector<std::string>& figure_names();

/// Runs one command. `figure` is used by `figures` only; `threads` by
/// `sweep` (0 = hardware concurrency). Provenance is filled in.
ResultTable run(const std::string& command, const RunConfig& cfg, const std::string& figure = {},
                unsigned threads = 0);

/// Figure presets: fig1, fig2-left, fig2-right, fig3-left, fig3-right, fig4.
ResultTable make_figure(const std::string& name, unsigned threads = 0);

/// Maps the error categories to exit codes 2 (ConfigError), 3
/// (AssumptionError) and 4 (NumericalError, IoError, anything else).
int exit_code_for(const std::exception& e);

/// Full command-line entry point; returns the process exit code. Nothing is
/// written to --out unless the command succeeds.
int cli_main(int argc, char** argv);

}  // namespace robustfolio
