#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "harvestrl/energy.hpp"
#include "harvestrl/rewards.hpp"
#include "harvestrl/rl_core.hpp"
#include "harvestrl/rng.hpp"

namespace harvestrl::scenarios {

struct AgentConfig {
  rl::ExplorationParams exploration;
  rl::LearningParams learning;
  bool learning_enabled = true;
  // 1-based action number applied every epoch instead of the learned choice.
  std::optional<int> forced_action;

  void validate(std::size_t n_actions) const;
};

// One decision epoch as logged in trace.csv.
struct TimeSeriesRecord {
  double t_min = 0.0;
  rl::StateId state;
  rl::ActionId action;
  double reward = 0.0;
  double soc = 0.0;        // state of charge at the end of the epoch
  double harvest_w = 0.0;  // mean harvested power over the epoch
  double load_ma = 0.0;    // average current drawn by the chosen mode
  double epsilon = 0.0;
  double alpha = 0.0;      // 0 when no update happened

  friend bool operator==(const TimeSeriesRecord&, const TimeSeriesRecord&) = default;
};

using PolicySnapshot = std::vector<rl::ActionId>;

struct ScenarioResult {
  std::vector<TimeSeriesRecord> records;
  // Greedy policy after each epoch's update, one entry per record.
  std::vector<PolicySnapshot> policies;
  rl::QTable q{1, 1};
  // Minute at which the battery first ran dry, if it did.
  std::optional<double> death_time_min;
};

// ---------------------------------------------------------------------------
// Body sensor node

enum class ActivityMode { IidUniform, FixedSchedule, File };

struct ActivitySegment {
  double start_min = 0.0;
  energy::Activity activity = energy::Activity::Relax;

  friend bool operator==(const ActivitySegment&, const ActivitySegment&) = default;
};

// Contiguous segments; each ends where the next starts, the last at end_min.
struct ActivityTrace {
  std::vector<ActivitySegment> segments;
  double end_min = 0.0;

  energy::Activity at(double t_min) const;
  friend bool operator==(const ActivityTrace&, const ActivityTrace&) = default;
};

struct WbanScenarioConfig {
  int duration_days = 7;
  double decision_period_min = 20.0;
  double activity_change_period_min = 30.0;
  double capacity_mah = 100.0;
  double initial_soc = 1.0;
  double nominal_voltage_v = energy::kDefaultNominalVoltage;
  rewards::RewardSpec reward = rewards::R1{0.3};
  ActivityMode activity_mode = ActivityMode::IidUniform;
  std::string activity_file;
  std::vector<energy::ActionSpec> actions = energy::wban_default_actions();
  energy::KineticHarvest kinetic;
  bool harvest_enabled = true;
  // Representative dominant motion frequency per activity, and its scale.
  std::array<double, 3> fm_hz{0.5, 1.5, 2.5};
  double fm_max_hz = 3.0;
  AgentConfig agent;

  double duration_min() const { return duration_days * 24.0 * 60.0; }
  std::size_t epochs() const;
  void validate() const;
};

// Segments of activity_change_period_min drawn per the configured mode.
// File mode reads `start_min,activity`; the last row lasts one change period.
ActivityTrace generate_activity_trace(const WbanScenarioConfig& cfg, Rng& rng);
ActivityTrace parse_activity_trace(std::istream& in, double change_period_min, double duration_min);

rl::StateId wban_state(energy::Activity a);
energy::Activity wban_activity(rl::StateId s);
inline constexpr std::size_t kWbanStates = 3;

ScenarioResult run_wban_scenario(const WbanScenarioConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Marine buoy

// SoC bands (left-closed) crossed with a day/night flag.
struct BuoyStateSpec {
  std::vector<double> soc_thresholds{0.25, 0.50, 0.75};
  bool day_night = true;

  std::size_t bands() const { return soc_thresholds.size() + 1; }
  std::size_t size() const { return bands() * (day_night ? 2 : 1); }
  void validate() const;
};

struct BuoyStateParts {
  std::size_t band = 0;
  bool day = true;
};

// index = band * 2 + (night ? 1 : 0) when the day/night split is enabled.
rl::StateId buoy_state(double soc, double harvest_w, const BuoyStateSpec& spec);
BuoyStateParts decode_buoy_state(rl::StateId s, const BuoyStateSpec& spec);
std::string buoy_state_label(rl::StateId s, const BuoyStateSpec& spec);
std::size_t soc_band(double soc, const BuoyStateSpec& spec);

// Full-duty draw is about 1.2x the mean daily solar harvest, so the battery
// drifts down at high sampling rates and recovers at low ones.
struct BuoyLoadModel {
  energy::ComponentLoad anemometer{"buoy.anemometer", 120.0, 0.0, 1.0};
  energy::ComponentLoad atmospheric{"buoy.atmospheric", 30.0, 0.0, 1.0};
  energy::ComponentLoad radio{"buoy.radio", 81.0, 0.0, 1.0};
  double mcu_freq_mhz = 32.0;
  double mcu_active_fraction = 1.0;
  double beacon_flash_ma = 20.0;

  // Sensors, radio and MCU active time scale with the sampling level; the
  // MCU sleep current is always drawn. Beacon excluded.
  double duty_load_ma(double fs_norm) const;
  void validate() const;
};

enum class SolarMode { Parametric, Trace, Off };

struct BuoyScenarioConfig {
  int duration_days = 21;
  double decision_period_min = 30.0;
  double capacity_mah = 5200.0;
  double initial_soc = 1.0;
  double nominal_voltage_v = energy::kDefaultNominalVoltage;
  rewards::RewardSpec reward = rewards::R7{};
  std::vector<double> fs_levels{0.1, 0.25, 0.5, 0.75, 1.0};
  BuoyStateSpec state_spec;
  BuoyLoadModel load;
  SolarMode solar_mode = SolarMode::Parametric;
  energy::SolarParametric solar;
  std::string solar_trace_file;
  std::optional<energy::SolarTrace> solar_trace;  // overrides the file when set
  int substeps = 6;  // battery integration steps per epoch
  AgentConfig agent;

  double duration_min() const { return duration_days * 24.0 * 60.0; }
  std::size_t epochs() const;
  std::vector<energy::ActionSpec> actions() const;
  void validate() const;
};

ScenarioResult run_buoy_scenario(const BuoyScenarioConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------

using ScenarioConfig = std::variant<WbanScenarioConfig, BuoyScenarioConfig>;

ScenarioResult run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);
const rewards::RewardSpec& scenario_reward(const ScenarioConfig& cfg);
void set_scenario_reward(ScenarioConfig& cfg, const rewards::RewardSpec& r);
AgentConfig& scenario_agent(ScenarioConfig& cfg);
double decision_period_min(const ScenarioConfig& cfg);
int duration_days(const ScenarioConfig& cfg);
// Largest average current in the action set.
double max_action_current(const ScenarioConfig& cfg);

}  // namespace harvestrl::scenarios
