#include "harvestrl/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "harvestrl/errors.hpp"

namespace harvestrl::scenarios {

using energy::Activity;
using energy::Battery;

void AgentConfig::validate(std::size_t n_actions) const {
  exploration.validate();
  learning.validate();
  if (forced_action && (*forced_action < 1 || static_cast<std::size_t>(*forced_action) > n_actions))
    throw ConfigError("rl.forced_action", "must name an action between 1 and " +
                                              std::to_string(n_actions));
}

namespace {

// Owns the Q-table and the agent's random stream for one run.
class Agent {
public:
  Agent(std::size_t n_states, std::size_t n_actions, const AgentConfig& cfg, Rng rng)
      : q_(n_states, n_actions), cfg_(cfg), rng_(rng) {}

  void observe(rl::StateId s) { q_.observe(s); }

  std::pair<rl::ActionId, double> choose(rl::StateId s) {
    const double eps = rl::compute_epsilon(cfg_.exploration, q_.visited_states(), q_.state_space_size());
    if (cfg_.forced_action) return {rl::ActionId{static_cast<std::size_t>(*cfg_.forced_action - 1)}, eps};
    return {rl::select_action(q_, s, cfg_.exploration, rng_), eps};
  }

  double learn(rl::StateId s, rl::ActionId a, double r, rl::StateId s_next) {
    if (!cfg_.learning_enabled) {
      q_.observe(s_next);
      return 0.0;
    }
    return rl::update_q(q_, s, a, r, s_next, cfg_.learning);
  }

  PolicySnapshot policy() const { return rl::greedy_policy(q_); }
  const rl::QTable& q() const { return q_; }

private:
  rl::QTable q_;
  AgentConfig cfg_;
  Rng rng_;
};

// Integrates one constant-current interval and notes when the battery runs dry.
Battery integrate(const Battery& b, double load_ma, double harvest_w, double t_min, double dt_min,
                  std::optional<double>& death_time_min) {
  const double net = energy::harvest_current_ma(harvest_w, b.nominal_voltage_v()) - load_ma;
  if (!death_time_min && !b.empty() && net < 0.0 && b.charge_mah() + net * dt_min / 60.0 <= 0.0)
    death_time_min = t_min + 60.0 * b.charge_mah() / -net;
  return energy::step_battery(b, load_ma, harvest_w, dt_min / 60.0);
}

std::size_t epoch_count(int days, double period_min, const char* section) {
  const double total = days * 24.0 * 60.0;
  const double n = total / period_min;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
    throw ConfigError(std::string(section) + ".decision_period_min",
                      "must divide the deployment duration evenly");
  return static_cast<std::size_t>(rounded);
}

void check_soc(double v, const std::string& key) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must lie in [0, 1]");
}

}  // namespace

// ---------------------------------------------------------------------------

Activity ActivityTrace::at(double t_min) const {
  if (segments.empty()) throw ContractViolation("empty activity trace");
  auto it = std::upper_bound(segments.begin(), segments.end(), t_min,
                             [](double t, const ActivitySegment& s) { return t < s.start_min; });
  if (it == segments.begin()) return segments.front().activity;
  return std::prev(it)->activity;
}

std::size_t WbanScenarioConfig::epochs() const {
  return epoch_count(duration_days, decision_period_min, "wban");
}

void WbanScenarioConfig::validate() const {
  if (duration_days < 1) throw ConfigError("wban.duration_days", "must be at least 1");
  if (!(decision_period_min > 0.0)) throw ConfigError("wban.decision_period_min", "must be positive");
  if (!(activity_change_period_min > 0.0))
    throw ConfigError("wban.activity_change_period_min", "must be positive");
  if (!(capacity_mah > 0.0)) throw ConfigError("wban.capacity_mah", "must be positive");
  check_soc(initial_soc, "wban.initial_soc");
  if (!(nominal_voltage_v > 0.0)) throw ConfigError("wban.nominal_voltage_v", "must be positive");
  if (actions.empty()) throw ConfigError("wban.actions", "action set must not be empty");
  for (const auto& a : actions) a.validate();
  for (double p : kinetic.power_uw)
    if (!(p >= 0.0)) throw ConfigError("wban.harvest_uw", "harvest powers must be non-negative");
  if (!(fm_max_hz > 0.0)) throw ConfigError("wban.fm_max_hz", "must be positive");
  if (activity_mode == ActivityMode::File && activity_file.empty())
    throw ConfigError("wban.activity_file", "required when activity_mode = file");
  rewards::validate(reward);
  agent.validate(actions.size());
  (void)epochs();
}

ActivityTrace parse_activity_trace(std::istream& in, double change_period_min, double duration_min) {
  ActivityTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("activity trace: missing header row");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IngestionError("activity trace line " + std::to_string(lineno) + ": expected start_min,activity");
    double start = 0.0;
    try {
      start = std::stod(line.substr(0, comma));
    } catch (const std::exception&) {
      throw IngestionError("activity trace line " + std::to_string(lineno) + ": bad start_min");
    }
    std::string act = line.substr(comma + 1);
    std::transform(act.begin(), act.end(), act.begin(), [](unsigned char c) { return std::tolower(c); });
    if (!trace.segments.empty() && !(start > trace.segments.back().start_min))
      throw IngestionError("activity trace line " + std::to_string(lineno) +
                           ": start_min must be strictly increasing");
    trace.segments.push_back({start, energy::activity_from_name(act)});
  }
  if (trace.segments.empty()) throw IngestionError("activity trace: no segments");
  if (trace.segments.front().start_min != 0.0)
    throw IngestionError("activity trace: first segment must start at 0");
  trace.end_min = trace.segments.back().start_min + change_period_min;
  if (trace.end_min < duration_min)
    throw IngestionError("activity trace ends at " + std::to_string(trace.end_min) +
                         " min, before the deployment end at " + std::to_string(duration_min) + " min");
  return trace;
}

ActivityTrace generate_activity_trace(const WbanScenarioConfig& cfg, Rng& rng) {
  if (cfg.activity_mode == ActivityMode::File) {
    std::ifstream in(cfg.activity_file);
    if (!in) throw IngestionError("cannot open activity trace '" + cfg.activity_file + "'");
    return parse_activity_trace(in, cfg.activity_change_period_min, cfg.duration_min());
  }
  const auto n = static_cast<std::size_t>(std::ceil(cfg.duration_min() / cfg.activity_change_period_min - 1e-9));
  ActivityTrace trace;
  trace.segments.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pick = cfg.activity_mode == ActivityMode::IidUniform
                          ? static_cast<std::size_t>(rng.uniform_index(3))
                          : i % 3;
    trace.segments.push_back({static_cast<double>(i) * cfg.activity_change_period_min,
                              energy::kActivities[pick]});
  }
  trace.end_min = static_cast<double>(n) * cfg.activity_change_period_min;
  return trace;
}

rl::StateId wban_state(Activity a) { return rl::StateId{static_cast<std::size_t>(a)}; }

Activity wban_activity(rl::StateId s) {
  if (s.index >= kWbanStates) throw ContractViolation("not a body-sensor state");
  return energy::kActivities[s.index];
}

ScenarioResult run_wban_scenario(const WbanScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Rng root(seed);
  Rng env = root.split(kEnvironmentStream);
  const ActivityTrace trace = generate_activity_trace(cfg, env);

  const auto& actions = cfg.actions;
  Agent agent(kWbanStates, actions.size(), cfg.agent, root.split(kAgentStream));

  const double period = cfg.decision_period_min;
  double max_current = 0.0;
  double min_period = std::numeric_limits<double>::infinity();
  for (const auto& a : actions) {
    max_current = std::max(max_current, a.avg_current_ma);
    min_period = std::min(min_period, a.period_min);
  }
  const double reference_drain = max_current * period / 60.0;

  ScenarioResult result;
  const std::size_t n = cfg.epochs();
  result.records.reserve(n);
  result.policies.reserve(n);
  Battery battery = Battery::from_soc(cfg.capacity_mah, cfg.initial_soc, cfg.nominal_voltage_v);

  agent.observe(wban_state(trace.at(0.0)));
  for (std::size_t e = 0; e < n; ++e) {
    const double t0 = static_cast<double>(e) * period;
    const double t1 = t0 + period;
    const rl::StateId s = wban_state(trace.at(t0));
    const auto [a, eps] = agent.choose(s);
    const auto& action = actions[a.index];
    const Battery before = battery;

    // Activity may change inside the epoch; integrate each piece separately.
    std::array<double, 3> time_in{0.0, 0.0, 0.0};
    double harvest_energy = 0.0;  // W * min
    double t = t0;
    while (t < t1) {
      const Activity act = trace.at(t);
      const auto seg = std::upper_bound(trace.segments.begin(), trace.segments.end(), t,
                                        [](double v, const ActivitySegment& sg) { return v < sg.start_min; });
      const double next = seg == trace.segments.end() ? t1 : std::min(t1, seg->start_min);
      const double dt = next - t;
      const double hw = cfg.harvest_enabled ? cfg.kinetic.power_at(act) * 1e-6 : 0.0;
      battery = integrate(battery, action.avg_current_ma, hw, t, dt, result.death_time_min);
      time_in[static_cast<std::size_t>(act)] += dt;
      harvest_energy += hw * dt;
      t = next;
    }

    // Dominant activity of the epoch; ties go to the one observed at its start.
    std::size_t dominant = static_cast<std::size_t>(wban_activity(s));
    for (std::size_t i = 0; i < 3; ++i)
      if (time_in[i] > time_in[dominant]) dominant = i;

    rewards::RewardContext ctx;
    ctx.sleep_period_min = action.period_min;
    ctx.min_sleep_period_min = min_period;
    ctx.soc_now = battery.soc();
    ctx.soc_prev = before.soc();
    ctx.delta_soc_norm = rewards::normalize_delta(battery.charge_mah() - before.charge_mah(), reference_drain);
    ctx.fm_norm = rewards::normalize_fm(cfg.fm_hz[dominant], cfg.fm_max_hz);
    ctx.fs_norm = action.fs_norm;
    const double r = rewards::evaluate(cfg.reward, ctx);

    const rl::StateId s_next = wban_state(trace.at(t1));
    const double alpha = agent.learn(s, a, r, s_next);

    result.records.push_back({t0, s, a, r, battery.soc(), harvest_energy / period,
                              action.avg_current_ma, eps, alpha});
    result.policies.push_back(agent.policy());
  }
  result.q = agent.q();
  return result;
}

// ---------------------------------------------------------------------------

void BuoyStateSpec::validate() const {
  for (std::size_t i = 0; i < soc_thresholds.size(); ++i) {
    const double t = soc_thresholds[i];
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("buoy.soc_bands", "thresholds must lie in (0, 1)");
    if (i > 0 && !(t > soc_thresholds[i - 1]))
      throw ConfigError("buoy.soc_bands", "thresholds must be strictly increasing");
  }
}

std::size_t soc_band(double soc, const BuoyStateSpec& spec) {
  std::size_t band = 0;
  for (double t : spec.soc_thresholds)
    if (soc >= t) ++band;
  return band;
}

rl::StateId buoy_state(double soc, double harvest_w, const BuoyStateSpec& spec) {
  if (!(soc >= 0.0 && soc <= 1.0)) throw ContractViolation("soc must lie in [0, 1]");
  const std::size_t band = soc_band(soc, spec);
  if (!spec.day_night) return rl::StateId{band};
  return rl::StateId{band * 2 + (harvest_w > 0.0 ? 0 : 1)};
}

BuoyStateParts decode_buoy_state(rl::StateId s, const BuoyStateSpec& spec) {
  if (s.index >= spec.size()) throw ContractViolation("not a buoy state");
  if (!spec.day_night) return {s.index, true};
  return {s.index / 2, s.index % 2 == 0};
}

std::string buoy_state_label(rl::StateId s, const BuoyStateSpec& spec) {
  const auto parts = decode_buoy_state(s, spec);
  std::string label = "band" + std::to_string(parts.band);
  if (spec.day_night) label += parts.day ? "-day" : "-night";
  return label;
}

double BuoyLoadModel::duty_load_ma(double fs_norm) const {
  const double mcu_active = energy::kMcuActiveMaPerMhz * mcu_freq_mhz;
  const double mcu = energy::kMcuSleepMa +
                     std::clamp(fs_norm, 0.0, 1.0) * mcu_active_fraction * (mcu_active - energy::kMcuSleepMa);
  return anemometer.average_ma(fs_norm) + atmospheric.average_ma(fs_norm) + radio.average_ma(fs_norm) + mcu;
}

void BuoyLoadModel::validate() const {
  anemometer.validate();
  atmospheric.validate();
  radio.validate();
  if (!(mcu_freq_mhz > 0.0)) throw ConfigError("buoy.mcu_freq_mhz", "must be positive");
  if (!(mcu_active_fraction >= 0.0 && mcu_active_fraction <= 1.0))
    throw ConfigError("buoy.mcu_active_fraction", "must lie in [0, 1]");
  if (!(beacon_flash_ma >= 0.0)) throw ConfigError("buoy.beacon_flash_ma", "must be non-negative");
}

std::size_t BuoyScenarioConfig::epochs() const {
  return epoch_count(duration_days, decision_period_min, "buoy");
}

std::vector<energy::ActionSpec> BuoyScenarioConfig::actions() const {
  std::vector<energy::ActionSpec> out;
  for (std::size_t i = 0; i < fs_levels.size(); ++i) {
    const double fs = fs_levels[i];
    // One measurement per minute at the full rate.
    out.push_back({rl::ActionId{i}, static_cast<int>(i + 1), load.mcu_freq_mhz, 1.0 / fs,
                   load.duty_load_ma(fs), fs});
  }
  return out;
}

void BuoyScenarioConfig::validate() const {
  if (duration_days < 1) throw ConfigError("buoy.duration_days", "must be at least 1");
  if (!(decision_period_min > 0.0)) throw ConfigError("buoy.decision_period_min", "must be positive");
  if (!(capacity_mah > 0.0)) throw ConfigError("buoy.capacity_mah", "must be positive");
  check_soc(initial_soc, "buoy.initial_soc");
  if (!(nominal_voltage_v > 0.0)) throw ConfigError("buoy.nominal_voltage_v", "must be positive");
  if (fs_levels.empty()) throw ConfigError("buoy.fs_levels", "action set must not be empty");
  for (std::size_t i = 0; i < fs_levels.size(); ++i) {
    if (!(fs_levels[i] > 0.0 && fs_levels[i] <= 1.0))
      throw ConfigError("buoy.fs_levels", "levels must lie in (0, 1]");
    if (i > 0 && !(fs_levels[i] > fs_levels[i - 1]))
      throw ConfigError("buoy.fs_levels", "levels must be strictly increasing");
  }
  if (fs_levels.back() != 1.0) throw ConfigError("buoy.fs_levels", "the highest level must be 1");
  state_spec.validate();
  load.validate();
  if (solar_mode == SolarMode::Parametric) solar.validate();
  if (solar_mode == SolarMode::Trace && !solar_trace && solar_trace_file.empty())
    throw ConfigError("buoy.solar_trace_file", "required when solar = trace");
  if (substeps < 1) throw ConfigError("buoy.substeps", "must be at least 1");
  rewards::validate(reward);
  agent.validate(fs_levels.size());
  (void)epochs();
}

ScenarioResult run_buoy_scenario(const BuoyScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Rng root(seed);

  std::optional<energy::HarvestModel> solar;
  if (cfg.solar_mode == SolarMode::Parametric) solar = cfg.solar;
  if (cfg.solar_mode == SolarMode::Trace)
    solar = cfg.solar_trace ? *cfg.solar_trace : energy::load_solar_trace(cfg.solar_trace_file);
  auto power_at = [&](double t_min) { return solar ? energy::solar_power_at(*solar, t_min / 60.0) : 0.0; };

  const auto actions = cfg.actions();
  const auto& spec = cfg.state_spec;
  Agent agent(spec.size(), actions.size(), cfg.agent, root.split(kAgentStream));

  const double period = cfg.decision_period_min;
  double max_current = 0.0;
  double min_period = std::numeric_limits<double>::infinity();
  for (const auto& a : actions) {
    max_current = std::max(max_current, a.avg_current_ma);
    min_period = std::min(min_period, a.period_min);
  }
  const double reference_drain = max_current * period / 60.0;
  const double dt = period / cfg.substeps;

  ScenarioResult result;
  const std::size_t n = cfg.epochs();
  result.records.reserve(n);
  result.policies.reserve(n);
  Battery battery = Battery::from_soc(cfg.capacity_mah, cfg.initial_soc, cfg.nominal_voltage_v);

  agent.observe(buoy_state(battery.soc(), power_at(0.0), spec));
  for (std::size_t e = 0; e < n; ++e) {
    const double t0 = static_cast<double>(e) * period;
    const rl::StateId s = buoy_state(battery.soc(), power_at(t0), spec);
    const auto [a, eps] = agent.choose(s);
    const auto& action = actions[a.index];
    const Battery before = battery;

    double harvest_sum = 0.0;
    double load_sum = 0.0;
    for (int k = 0; k < cfg.substeps; ++k) {
      const double t = t0 + (k + 0.5) * dt;
      const double hw = power_at(t);
      const double load = action.avg_current_ma + energy::beacon_average_current(cfg.load.beacon_flash_ma, hw <= 0.0);
      battery = integrate(battery, load, hw, t0 + k * dt, dt, result.death_time_min);
      harvest_sum += hw;
      load_sum += load;
    }

    rewards::RewardContext ctx;
    ctx.sleep_period_min = action.period_min;
    ctx.min_sleep_period_min = min_period;
    ctx.soc_now = battery.soc();
    ctx.soc_prev = before.soc();
    ctx.delta_soc_norm = rewards::normalize_delta(battery.charge_mah() - before.charge_mah(), reference_drain);
    ctx.fm_norm = 0.0;
    ctx.fs_norm = action.fs_norm;
    const double r = rewards::evaluate(cfg.reward, ctx);

    const rl::StateId s_next = buoy_state(battery.soc(), power_at(t0 + period), spec);
    const double alpha = agent.learn(s, a, r, s_next);

    result.records.push_back({t0, s, a, r, battery.soc(), harvest_sum / cfg.substeps,
                              load_sum / cfg.substeps, eps, alpha});
    result.policies.push_back(agent.policy());
  }
  result.q = agent.q();
  return result;
}

// ---------------------------------------------------------------------------

ScenarioResult run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  return std::visit(
      [seed](const auto& c) -> ScenarioResult {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, WbanScenarioConfig>)
          return run_wban_scenario(c, seed);
        else
          return run_buoy_scenario(c, seed);
      },
      cfg);
}

const rewards::RewardSpec& scenario_reward(const ScenarioConfig& cfg) {
  return std::visit([](const auto& c) -> const rewards::RewardSpec& { return c.reward; }, cfg);
}

void set_scenario_reward(ScenarioConfig& cfg, const rewards::RewardSpec& r) {
  std::visit([&r](auto& c) { c.reward = r; }, cfg);
}

AgentConfig& scenario_agent(ScenarioConfig& cfg) {
  return std::visit([](auto& c) -> AgentConfig& { return c.agent; }, cfg);
}

double decision_period_min(const ScenarioConfig& cfg) {
  return std::visit([](const auto& c) { return c.decision_period_min; }, cfg);
}

int duration_days(const ScenarioConfig& cfg) {
  return std::visit([](const auto& c) { return c.duration_days; }, cfg);
}

double max_action_current(const ScenarioConfig& cfg) {
  if (const auto* w = std::get_if<WbanScenarioConfig>(&cfg)) {
    double m = 0.0;
    for (const auto& a : w->actions) m = std::max(m, a.avg_current_ma);
    return m;
  }
  const auto& b = std::get<BuoyScenarioConfig>(cfg);
  double m = 0.0;
  for (const auto& a : b.actions()) m = std::max(m, a.avg_current_ma);
  return m;
}

}  // namespace harvestrl::scenarios
