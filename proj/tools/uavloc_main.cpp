#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "uavloc/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  int trials = -1;
  std::int64_t seed = -1;
  std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Experiment configuration file (JSON)");
  cmd->add_option("--trials", flags.trials, "Monte Carlo trials per sweep value");
  cmd->add_option("--seed", flags.seed, "Base RNG seed");
  cmd->add_option("--out", flags.out_path, "Output CSV path");
}

uavloc::ExperimentConfig resolve_config(const CommonFlags& flags) {
  uavloc::ExperimentConfig config;
  if (!flags.config_path.empty()) config = uavloc::load_config(flags.config_path);
  if (flags.trials >= 0) config.trials = flags.trials;
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.out_path.empty()) config.out_path = flags.out_path;
  if (config.out_path.empty()) config.out_path = "rmse.csv";
  return config;
}

int run_experiment(uavloc::ExperimentConfig config) {
  if (config.sweep.values.empty()) {
    config.sweep.kind = uavloc::SweepSpec::Kind::UavCount;
    config.sweep.values = {static_cast<double>(config.scenario.n_uavs)};
  }
  const uavloc::RmseTable table = uavloc::monte_carlo(config);
  uavloc::emit_csv(table, config.out_path);
  std::cout << "wrote " << table.rows.size() << " rows to " << config.out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed RSS emitter localization simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  add_common_flags(run_cmd, run_flags);

  CommonFlags rounds_flags;
  int k_max = 10;
  CLI::App* rounds_cmd =
      app.add_subcommand("sweep-rounds", "RMSE versus communication rounds (1..k_max)");
  add_common_flags(rounds_cmd, rounds_flags);
  rounds_cmd->add_option("--k-max", k_max, "Largest round budget")->check(CLI::PositiveNumber);

  CommonFlags uavs_flags;
  std::vector<int> uav_counts = {4, 6, 8};
  CLI::App* uavs_cmd = app.add_subcommand("sweep-uavs", "RMSE versus the number of UAVs");
  add_common_flags(uavs_cmd, uavs_flags);
  uavs_cmd->add_option("--uavs", uav_counts, "UAV counts to sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return run_experiment(resolve_config(run_flags));
    }
    if (rounds_cmd->parsed()) {
      uavloc::ExperimentConfig config = resolve_config(rounds_flags);
      config.sweep.kind = uavloc::SweepSpec::Kind::Rounds;
      config.sweep.values.clear();
      for (int k = 1; k <= k_max; ++k) config.sweep.values.push_back(static_cast<double>(k));
      return run_experiment(std::move(config));
    }
    if (uavs_cmd->parsed()) {
      uavloc::ExperimentConfig config = resolve_config(uavs_flags);
      config.sweep.kind = uavloc::SweepSpec::Kind::UavCount;
      config.sweep.values.clear();
      for (int n : uav_counts) config.sweep.values.push_back(static_cast<double>(n));
      return run_experiment(std::move(config));
    }
  } catch (const uavloc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
