#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>

namespace harvestrl::rewards {

// Everything a reward function may look at after one decision epoch.
struct RewardContext {
  double sleep_period_min = 1.0;      // period of the chosen action
  double min_sleep_period_min = 1.0;  // shortest period in the action set
  double soc_now = 1.0;
  double soc_prev = 1.0;
  double delta_soc_norm = 0.0;  // battery change over the epoch, see normalize_delta
  double fm_norm = 0.0;         // dominant motion frequency scaled to [0, 1]
  double fs_norm = 0.0;         // sampling frequency scaled to [0, 1]

  // Throws ContractViolation when a field is out of range.
  void validate() const;
};

// Battery change over one epoch divided by the charge the most consuming
// action drains in one epoch with no harvest, clamped to [-1, 1].
double normalize_delta(double delta_charge_mah, double reference_drain_mah);

// F_m / fm_max clamped to [0, 1].
double normalize_fm(double fm_hz, double fm_max_hz = 3.0);

double clamp_reward(double r);

double reward_r1(const RewardContext& ctx, double beta);
double reward_r2(const RewardContext& ctx, double beta);
double reward_r3(const RewardContext& ctx);
double reward_r4(const RewardContext& ctx);
double reward_r5(const RewardContext& ctx);
double reward_r6(const RewardContext& ctx, const std::array<double, 4>& rho,
                 const std::array<double, 3>& thresholds);
double reward_r7(const RewardContext& ctx);

struct R1 { double beta = 0.3; };
struct R2 { double beta = 0.3; };
struct R3 {};
struct R4 {};
struct R5 {};
struct R6 {
  std::array<double, 4> rho{1.0, 0.6, 0.3, 0.0};
  std::array<double, 3> thresholds{0.75, 0.50, 0.25};
};
struct R7 {};

using RewardSpec = std::variant<R1, R2, R3, R4, R5, R6, R7>;

std::string_view name(const RewardSpec& spec);

// Spec with default parameters for "R1".."R7" (case-insensitive).
// Throws ConfigError("reward.name") otherwise.
RewardSpec spec_from_name(std::string_view name);

// Checks parameter invariants; errors name the offending `reward.*` key.
void validate(const RewardSpec& spec);

double evaluate(const RewardSpec& spec, const RewardContext& ctx);

}  // namespace harvestrl::rewards
