#pragma once

#include <string>
#include <vector>

#include "fbi_cli/pipeline.hpp"

namespace fbi::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_cache = 2;
inline constexpr int exit_validation = 3;
inline constexpr int exit_internal = 4;

const std::vector<std::string>& command_names();
std::string command_help(const std::string& name);

// Runs one subcommand, writing <out_dir>/<name>.json (+ .meta.json, CSVs).
// Returns exit_ok or exit_validation; library errors propagate.
int run_command(const std::string& name, Pipeline& pipeline);

void set_threads(int n);

}  // namespace fbi::cli
