#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"

namespace qladder::cli {

/// Command-line values that take precedence over the config document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
  std::optional<std::string> out;
  std::optional<std::int64_t> snapshot_every;
};

struct Experiment {
  Json doc;
  std::filesystem::path config_path;
  Overrides overrides;
};

Experiment load_experiment(const std::filesystem::path& config_path, Overrides overrides);

void cmd_stationary(const Experiment& exp);
void cmd_density(const Experiment& exp);
void cmd_bellman(const Experiment& exp);
void cmd_brw(const Experiment& exp);
void cmd_analyze(const Experiment& exp);

/// Exit code for an exception escaping a command: CliError carries its own,
/// precondition failures map to 2, I/O to 3, numeric failures to 4, and
/// anything unexpected to 1.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace qladder::cli
