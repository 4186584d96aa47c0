#pragma once
// Entry point and config schema for the slicebench command-line tool,
// factored out of main() so tests can drive subcommands in-process.

#include <string>
#include <vector>

#include <json.hpp>

namespace slicebench {

// Runs one slicebench invocation. argv follows main() conventions
// (argv[0] = program name). Returns the process exit code:
//   0 success, 2 argument/config error, 3 runtime or I/O error.
int cli_main(int argc, const char* const* argv);

// Convenience overload for tests: args exclude the program name.
int cli_main(const std::vector<std::string>& args);

// The schema the bench subcommand validates --config files against.
// Identical to the shipped schema/bench_config.schema.json document.
const nlohmann::json& bench_config_schema();

}  // namespace slicebench
