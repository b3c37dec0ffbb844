#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harvestrl/rewards.hpp"
#include "harvestrl/scenarios.hpp"

namespace harvestrl::harness {

struct RunSummary {
  std::string reward;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
  // Mean load current per activity (relax, walk, run) over the maximum
  // action current. Absent for activities never observed and for the buoy.
  std::array<std::optional<double>, 3> normalized_consumption;
  double final_soc = 0.0;
  double min_soc = 0.0;
  double survived_days = 0.0;
  // Policy stability time; nullopt means "not converged".
  std::optional<std::size_t> learning_time_epochs;
  double epoch_min = 0.0;
  int duration_days = 0;

  std::optional<double> learning_time_days() const;
};

// Pure fold over one run. Throws ContractViolation on an empty record list.
RunSummary summarize(std::span<const scenarios::TimeSeriesRecord> records,
                     std::span<const scenarios::PolicySnapshot> policies,
                     const scenarios::ScenarioConfig& cfg, std::uint64_t seed = 0);
RunSummary summarize(const scenarios::ScenarioResult& result, const scenarios::ScenarioConfig& cfg,
                     std::uint64_t seed = 0);

// Earliest epoch t such that every greedy snapshot from t onward agrees with
// the final snapshot on every state visited at or after t. nullopt when no
// such epoch falls before the last 10% of the run.
std::optional<std::size_t> policy_stability_time(std::span<const scenarios::TimeSeriesRecord> records,
                                                 std::span<const scenarios::PolicySnapshot> policies);

// Seeds base..base+n-1, run concurrently, returned in seed order.
std::vector<RunSummary> sweep_seeds(const scenarios::ScenarioConfig& cfg, std::uint64_t base_seed,
                                    std::size_t n_seeds);
std::vector<RunSummary> sweep_seeds(const scenarios::ScenarioConfig& cfg,
                                    std::span<const std::uint64_t> seeds);

// Field-wise median. "Not converged" ranks above every finite learning time.
RunSummary median_summary(std::span<const RunSummary> runs);

inline constexpr double kOrderingMargin = 0.02;

// relax + margin < walk and walk + margin < run (normalized units).
bool ordering_flag(const std::array<std::optional<double>, 3>& consumption,
                   double margin = kOrderingMargin);

// (max - min) / mean over present activities.
double consumption_spread(const std::array<std::optional<double>, 3>& consumption);

struct ComparisonRow {
  std::string reward;
  RunSummary median;
  bool ordering = false;
  bool survival = false;  // min SoC stayed above zero in every seed
  std::vector<RunSummary> runs;
};

std::vector<ComparisonRow> compare_rewards(const scenarios::ScenarioConfig& base,
                                           std::span<const rewards::RewardSpec> reward_list,
                                           std::span<const std::uint64_t> seeds);

// Spearman rank correlation with average ranks for ties; 0 when either
// series is constant.
double spearman(std::span<const double> x, std::span<const double> y);

// Rank correlation between the chosen sampling level and the SoC band over
// epochs at or after `from_epoch`.
double tracking_correlation(std::span<const scenarios::TimeSeriesRecord> records,
                            const scenarios::BuoyScenarioConfig& cfg, std::size_t from_epoch);

double median(std::vector<double> xs);

}  // namespace harvestrl::harness
