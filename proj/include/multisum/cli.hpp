#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "multisum/json_io.hpp"

namespace multisum {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitHypotheses = 3,
  kExitDivergence = 4,
};

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  unsigned workers = 1;
  std::optional<std::uint64_t> seed_override;
  std::string which;  // verify only; overrides verify.which in the config
};

struct CommandResult {
  int exit_code = kExitOk;
  std::map<std::string, std::string> files;  // role -> file name inside the output directory
  std::string error_json;                    // set when exit_code is 1 or 2
};

// Runs bound | simulate | verify | psi. Never throws; failures land in error_json.
CommandResult run_command(const std::string& subcommand, const CliOptions& opts);
// Same with the configuration already in memory; relative paths resolve against base_dir.
CommandResult run_command_json(const std::string& subcommand, const Json& config,
                               const std::filesystem::path& base_dir, const CliOptions& opts);

}  // namespace multisum
