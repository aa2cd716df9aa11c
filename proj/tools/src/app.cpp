#include "app.hpp"

#include <iostream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qladder/errors.hpp"

namespace qladder::cli {

namespace {

struct Subcommand {
  const char* name;
  const char* help;
  void (*action)(const Experiment&);
  bool takes_run_flags;
};

constexpr Subcommand kSubcommands[] = {
    {"stationary", "Stationary distribution of the exogenous ladder", cmd_stationary, false},
    {"density", "Stationary truncated power law of the density-dependent ladder", cmd_density, false},
    {"bellman", "Endogenous support size from the Bellman equations", cmd_bellman, false},
    {"brw", "Simulate N-BRW / L-BRW replicas", cmd_brw, true},
    {"analyze", "Compare a brw output directory with the analytic predictions", cmd_analyze, false},
};

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& err) {
  CLI::App app{"Quality-ladder growth models: mean-field solvers and finite-firm simulations", "qladder"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qladder 0.1.0");

  std::string config_path;
  Overrides overrides;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
  std::string out;
  std::int64_t snapshot_every = 0;

  std::vector<std::pair<CLI::App*, const Subcommand*>> subs;
  for (const auto& entry : kSubcommands) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.help);
    sub->add_option("--config", config_path, "Experiment JSON document")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides config.out)");
    if (entry.takes_run_flags) {
      sub->add_option("--seed", seed, "Base seed (overrides config.seed)");
      sub->add_option("--replicas", replicas, "Number of replicas (overrides config.replicas)");
      sub->add_option("--snapshot-every", snapshot_every, "Profile snapshot period, 0 = none");
    }
    subs.emplace_back(sub, &entry);
  }

  std::ostringstream help_out;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_err;
    const int code = app.exit(e, help_out, cli_err);
    if (code == 0) {
      std::cout << help_out.str();
      return 0;
    }
    err << cli_err.str();
    return static_cast<int>(ExitCode::kValidation);
  }

  for (const auto& [sub, entry] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--out") > 0) overrides.out = out;
    if (entry->takes_run_flags) {
      if (sub->count("--seed") > 0) overrides.seed = seed;
      if (sub->count("--replicas") > 0) overrides.replicas = replicas;
      if (sub->count("--snapshot-every") > 0) overrides.snapshot_every = snapshot_every;
    }
    try {
      entry->action(load_experiment(config_path, overrides));
      return 0;
    } catch (const std::exception& e) {
      err << "qladder " << entry->name << ": error: " << e.what() << '\n';
      return exit_code_for(e);
    }
  }
  return static_cast<int>(ExitCode::kValidation);
}

}  // namespace qladder::cli
