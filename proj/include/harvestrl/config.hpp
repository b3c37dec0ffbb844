#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harvestrl/rewards.hpp"
#include "harvestrl/scenarios.hpp"

namespace harvestrl::config {

enum class ScenarioKind { Wban, Buoy };

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::Wban;
  scenarios::WbanScenarioConfig wban;
  scenarios::BuoyScenarioConfig buoy;
  scenarios::AgentConfig agent;
  std::uint64_t seed = 1;
  // One entry per reward function to run; more than one triggers compare.csv.
  std::vector<rewards::RewardSpec> rewards{rewards::R1{}};
  std::string out_dir;  // empty: fall back to HARVESTRL_OUT, then "harvestrl_out"
  std::size_t sweep = 1;

  // Scenario config for rewards[i], with the shared rl block applied.
  scenarios::ScenarioConfig scenario_config(std::size_t reward_index = 0) const;
  void validate() const;
};

// Parses the sectioned key = value format. Unknown keys and sections are
// rejected. Throws ConfigParseError for malformed lines and ConfigError
// (naming section.key) for invalid values.
ExperimentConfig parse_config(const std::string& text);

// Reads and parses a file; IoError when it cannot be read.
ExperimentConfig load_config(const std::string& path);

// Canonical text of the full effective config; parse_config of the result
// reproduces `cfg` exactly.
std::string serialize(const ExperimentConfig& cfg);

// Canonical text of a single-reward scenario, used for fingerprints.
std::string serialize(const scenarios::ScenarioConfig& cfg);

// FNV-1a 64-bit.
std::uint64_t fingerprint(const std::string& text);
std::uint64_t scenario_fingerprint(const scenarios::ScenarioConfig& cfg);

// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace harvestrl::config

namespace harvestrl::config {

// Replaces the reward list by `names` ("R1,R5"), keeping the configured
// beta/rho/threshold parameters.
void override_rewards(ExperimentConfig& cfg, const std::string& names);

}  // namespace harvestrl::config
