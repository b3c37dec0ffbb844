// harvestrl: run an energy-management experiment described by a config file.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "harvestrl/config.hpp"
#include "harvestrl/errors.hpp"
#include "harvestrl/runner.hpp"

int main(int argc, char** argv) {
  using namespace harvestrl;

  CLI::App app{"Q-learning energy management simulator for energy-harvesting sensor nodes"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sweep;
  std::string out_dir;
  std::string reward;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--seed", seed, "base seed (overrides rl.seed)");
  app.add_option("--sweep", sweep, "number of seeds (overrides output.sweep)");
  app.add_option("--out", out_dir, "output directory (overrides output.dir and HARVESTRL_OUT)");
  app.add_option("--reward", reward, "reward function(s), e.g. R7 or R1,R2,R5");
  app.add_flag("--quiet", quiet, "suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kExitConfigError;
  }

  config::ExperimentConfig cfg;
  try {
    cfg = config::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (sweep) cfg.sweep = *sweep;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!reward.empty()) config::override_rewards(cfg, reward);
    cfg.validate();
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return cli::kExitIoError;
  } catch (const ConfigParseError& e) {
    std::cerr << "config parse error: " << e.what() << '\n';
    return cli::kExitConfigParseError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfigError;
  }
  return cli::run(cfg, std::cerr, quiet);
}
