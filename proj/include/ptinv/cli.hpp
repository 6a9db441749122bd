#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "ptinv/config.hpp"

namespace ptinv {

struct RunConfig {
    std::string command;
    std::string potential;           // expression or table description
    std::optional<std::string> g;    // positive function for classify
    SolverConfig solver;
    unsigned workers = 1;
    std::string out = ".";
    std::string table;   // invert input (default <out>/samples.csv)
    std::string result;  // plotdata input
};

/// Runs one subcommand; returns the process exit status. Errors are reported
/// on `err` and mapped to their documented codes.
int run_command(const RunConfig& rc, std::ostream& out, std::ostream& err);

/// Parses argv (flags, PTINV_* environment, optional JSON config) and runs.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ptinv
