#pragma once

#include <exception>
#include <string>
#include <vector>

#include "magnus/runconfig.hpp"

namespace magnus::cli {

inline constexpr const char* kToolVersion = "magnus 1.0.0";

struct Artifact {
    std::string path;  // empty: standard output
    std::string content;
};

struct CommandResult {
    std::vector<Artifact> artifacts;
    int exit_code = 0;  // nonzero when a per-point failure was recorded
};

CommandResult cmd_jsa(const RunConfig& run);
CommandResult cmd_metrics(const RunConfig& run);
CommandResult cmd_fc(const RunConfig& run);
CommandResult cmd_oracle(const RunConfig& run);
CommandResult cmd_dispersion(const RunConfig& run);

// Dispatch by name; throws ConfigError for an unknown command.
CommandResult run_command(const std::string& name, const RunConfig& run);

// 2 config, 3 numerical, 4 I/O.
int exit_code_for(const std::exception& e);
// One-line JSON error record.
std::string error_record(const std::exception& e);

// Shortest round-trip decimal text.
std::string fmt(double x);

}  // namespace magnus::cli
