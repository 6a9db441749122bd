#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli_runner {

struct Result {
    int status = -1;
    std::string output;  // stdout and stderr together
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the ptinv binary with `args` (already shell-quoted) and an optional
/// environment prefix such as "PTINV_POTENTIAL=x ".
inline Result run(const std::string& args, const std::string& env = "") {
    const auto log = std::filesystem::temp_directory_path() / "ptinv_cli_output.txt";
    const std::string cmd = env + "'" PTINV_BIN "' " + args + " > '" + log.string() + "' 2>&1";
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.output = slurp(log);
    std::filesystem::remove(log);
    return r;
}

inline std::string fixture(const std::string& name) { return std::string(PTINV_FIXTURES) + "/" + name; }

}  // namespace cli_runner
