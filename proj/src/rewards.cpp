#include "harvestrl/rewards.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "harvestrl/errors.hpp"

namespace harvestrl::rewards {

namespace {

bool within(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

double performance_term(const RewardContext& ctx) {
  return ctx.min_sleep_period_min / ctx.sleep_period_min;
}

// F_s * rho + B * (1 - rho)
double blend(double fs, double soc, double rho) { return fs * rho + soc * (1.0 - rho); }

}  // namespace

void RewardContext::validate() const {
  if (!(std::isfinite(sleep_period_min) && sleep_period_min > 0.0))
    throw ContractViolation("sleep_period_min must be positive");
  if (!(std::isfinite(min_sleep_period_min) && min_sleep_period_min > 0.0 &&
        min_sleep_period_min <= sleep_period_min))
    throw ContractViolation("min_sleep_period_min must lie in (0, sleep_period_min]");
  if (!within(soc_now, 0.0, 1.0)) throw ContractViolation("soc_now outside [0, 1]");
  if (!within(soc_prev, 0.0, 1.0)) throw ContractViolation("soc_prev outside [0, 1]");
  if (!within(delta_soc_norm, -1.0, 1.0)) throw ContractViolation("delta_soc_norm outside [-1, 1]");
  if (!within(fm_norm, 0.0, 1.0)) throw ContractViolation("fm_norm outside [0, 1]");
  if (!within(fs_norm, 0.0, 1.0)) throw ContractViolation("fs_norm outside [0, 1]");
}

double normalize_delta(double delta_charge_mah, double reference_drain_mah) {
  if (!(reference_drain_mah > 0.0)) throw ContractViolation("reference drain must be positive");
  return std::clamp(delta_charge_mah / reference_drain_mah, -1.0, 1.0);
}

double normalize_fm(double fm_hz, double fm_max_hz) {
  if (!(fm_max_hz > 0.0)) throw ContractViolation("fm_max_hz must be positive");
  return std::clamp(fm_hz / fm_max_hz, 0.0, 1.0);
}

double clamp_reward(double r) { return std::clamp(r, -1.0, 1.0); }

double reward_r1(const RewardContext& ctx, double beta) {
  return clamp_reward(beta * performance_term(ctx) + (1.0 - beta) * ctx.delta_soc_norm);
}

double reward_r2(const RewardContext& ctx, double beta) {
  return clamp_reward(beta * performance_term(ctx) + (1.0 - beta) * ctx.soc_now);
}

double reward_r3(const RewardContext& ctx) { return clamp_reward(ctx.delta_soc_norm); }

double reward_r4(const RewardContext& ctx) {
  return clamp_reward(performance_term(ctx) * ctx.soc_now);
}

double reward_r5(const RewardContext& ctx) {
  return clamp_reward(std::cos((ctx.fm_norm - ctx.delta_soc_norm) / 2.0));
}

double reward_r6(const RewardContext& ctx, const std::array<double, 4>& rho,
                 const std::array<double, 3>& thresholds) {
  const double b = ctx.soc_now;
  std::size_t band = 3;
  if (b >= thresholds[0]) band = 0;
  else if (b >= thresholds[1]) band = 1;
  else if (b >= thresholds[2]) band = 2;
  return clamp_reward(blend(ctx.fs_norm, b, rho[band]));
}

double reward_r7(const RewardContext& ctx) {
  // The battery level itself plays the role of the balancing parameter.
  return clamp_reward(blend(ctx.fs_norm, ctx.soc_now, ctx.soc_now));
}

std::string_view name(const RewardSpec& spec) {
  static constexpr std::string_view names[] = {"R1", "R2", "R3", "R4", "R5", "R6", "R7"};
  return names[spec.index()];
}

RewardSpec spec_from_name(std::string_view raw) {
  std::string n(raw);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::toupper(c); });
  if (n == "R1") return R1{};
  if (n == "R2") return R2{};
  if (n == "R3") return R3{};
  if (n == "R4") return R4{};
  if (n == "R5") return R5{};
  if (n == "R6") return R6{};
  if (n == "R7") return R7{};
  throw ConfigError("reward.name", "unknown reward function '" + std::string(raw) +
                                       "' (expected R1..R7)");
}

void validate(const RewardSpec& spec) {
  struct Visitor {
    void operator()(const R1& r) const { check_beta(r.beta); }
    void operator()(const R2& r) const { check_beta(r.beta); }
    void operator()(const R3&) const {}
    void operator()(const R4&) const {}
    void operator()(const R5&) const {}
    void operator()(const R6& r) const {
      for (std::size_t i = 0; i < 4; ++i)
        if (!within(r.rho[i], 0.0, 1.0))
          throw ConfigError("reward.rho" + std::to_string(i + 1), "must lie in [0, 1]");
      for (std::size_t i = 1; i < 4; ++i)
        if (!(r.rho[i - 1] > r.rho[i]))
          throw ConfigError("reward.rho" + std::to_string(i + 1),
                            "ordering invariant 1 >= rho1 > rho2 > rho3 > rho4 >= 0 violated");
      for (std::size_t i = 0; i < 3; ++i)
        if (!(std::isfinite(r.thresholds[i]) && r.thresholds[i] > 0.0 && r.thresholds[i] < 1.0))
          throw ConfigError("reward.t" + std::to_string(i + 1), "must lie in (0, 1)");
      for (std::size_t i = 1; i < 3; ++i)
        if (!(r.thresholds[i - 1] > r.thresholds[i]))
          throw ConfigError("reward.t" + std::to_string(i + 1),
                            "ordering invariant 1 > t1 > t2 > t3 > 0 violated");
    }
    void operator()(const R7&) const {}
    static void check_beta(double beta) {
      if (!within(beta, 0.0, 1.0)) throw ConfigError("reward.beta", "must lie in [0, 1]");
    }
  };
  std::visit(Visitor{}, spec);
}

double evaluate(const RewardSpec& spec, const RewardContext& ctx) {
  struct Visitor {
    const RewardContext& ctx;
    double operator()(const R1& r) const { return reward_r1(ctx, r.beta); }
    double operator()(const R2& r) const { return reward_r2(ctx, r.beta); }
    double operator()(const R3&) const { return reward_r3(ctx); }
    double operator()(const R4&) const { return reward_r4(ctx); }
    double operator()(const R5&) const { return reward_r5(ctx); }
    double operator()(const R6& r) const { return reward_r6(ctx, r.rho, r.thresholds); }
    double operator()(const R7&) const { return reward_r7(ctx); }
  };
  return std::visit(Visitor{ctx}, spec);
}

}  // namespace harvestrl::rewards
