#include "harvestrl/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "harvestrl/errors.hpp"

namespace harvestrl::energy {

Battery::Battery(double capacity_mah, double charge_mah, double nominal_voltage_v)
    : capacity_mah_(capacity_mah), charge_mah_(charge_mah), nominal_voltage_v_(nominal_voltage_v) {
  if (!(std::isfinite(capacity_mah) && capacity_mah > 0.0))
    throw ConfigError("capacity_mah", "battery capacity must be positive");
  if (!(std::isfinite(charge_mah) && charge_mah >= 0.0 && charge_mah <= capacity_mah))
    throw ConfigError("", "battery charge must lie in [0, capacity]");
  if (!(std::isfinite(nominal_voltage_v) && nominal_voltage_v > 0.0))
    throw ConfigError("nominal_voltage_v", "nominal voltage must be positive");
}

Battery Battery::from_soc(double capacity_mah, double soc, double nominal_voltage_v) {
  if (!(soc >= 0.0 && soc <= 1.0)) throw ConfigError("initial_soc", "must lie in [0, 1]");
  return Battery(capacity_mah, capacity_mah * soc, nominal_voltage_v);
}

double harvest_current_ma(double harvest_w, double nominal_voltage_v) {
  return 1000.0 * harvest_w / nominal_voltage_v;
}

Battery step_battery(const Battery& b, double load_ma, double harvest_w, double dt_h) {
  if (!(dt_h > 0.0)) throw ContractViolation("dt_h must be positive");
  if (!(load_ma >= 0.0)) throw ContractViolation("load must be non-negative");
  if (!(harvest_w >= 0.0)) throw ContractViolation("harvest must be non-negative");
  const double net_ma = harvest_current_ma(harvest_w, b.nominal_voltage_v()) - load_ma;
  const double charge = std::clamp(b.charge_mah() + net_ma * dt_h, 0.0, b.capacity_mah());
  return Battery(b.capacity_mah(), charge, b.nominal_voltage_v());
}

void ComponentLoad::validate() const {
  if (!(sleep_ma >= 0.0 && active_ma >= sleep_ma))
    throw ConfigError(name, "component currents must satisfy active >= sleep >= 0");
  if (!(active_fraction >= 0.0 && active_fraction <= 1.0))
    throw ConfigError(name, "active fraction must lie in [0, 1]");
}

double ComponentLoad::average_ma(double rate) const {
  return sleep_ma + std::clamp(rate, 0.0, 1.0) * active_fraction * (active_ma - sleep_ma);
}

void ActionSpec::validate() const {
  if (!(avg_current_ma > 0.0)) throw ConfigError("", "action average current must be positive");
  if (!(period_min > 0.0)) throw ConfigError("", "action period must be positive");
  if (!(fs_norm >= 0.0 && fs_norm <= 1.0)) throw ConfigError("", "fs_norm must lie in [0, 1]");
}

std::vector<ActionSpec> wban_default_actions() {
  // F_p, P_s and measured average current per operating mode.
  return {
      {rl::ActionId{0}, 1, 32.0, 1.0, 0.6278, 1.0},
      {rl::ActionId{1}, 2, 4.0, 1.0, 0.4873, 1.0},
      {rl::ActionId{2}, 3, 4.0, 5.0, 0.2292, 0.2},
      {rl::ActionId{3}, 4, 4.0, 20.0, 0.2044, 0.05},
      {rl::ActionId{4}, 5, 1.0, 60.0, 0.1926, 1.0 / 60.0},
  };
}

double action_average_current(std::span<const ActionSpec> actions, int number) {
  for (const auto& a : actions)
    if (a.number == number) return a.avg_current_ma;
  throw ConfigError("action", "unknown action number " + std::to_string(number));
}

std::string_view activity_name(Activity a) {
  switch (a) {
    case Activity::Relax: return "relax";
    case Activity::Walk: return "walk";
    case Activity::Run: return "run";
  }
  return "?";
}

Activity activity_from_name(std::string_view name) {
  for (auto a : kActivities)
    if (activity_name(a) == name) return a;
  throw IngestionError("unknown activity '" + std::string(name) + "'");
}

Activity activity_from_fm(double fm_hz) {
  if (!(fm_hz >= 0.0)) throw ContractViolation("motion frequency must be non-negative");
  if (fm_hz > 2.0) return Activity::Run;
  if (fm_hz > 1.0) return Activity::Walk;
  return Activity::Relax;
}

double harvest_power_kinetic(Activity a) { return KineticHarvest{}.power_at(a); }

void SolarParametric::validate() const {
  if (!(rated_w >= 0.0)) throw ConfigError("buoy.solar_rated_w", "must be non-negative");
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw ConfigError("buoy.solar_efficiency", "must lie in (0, 1]");
  if (!(sunrise_h >= 0.0 && sunrise_h < 24.0))
    throw ConfigError("buoy.sunrise_h", "must lie in [0, 24)");
  if (!(daylength_h > 0.0 && daylength_h <= 24.0))
    throw ConfigError("buoy.daylength_h", "must lie in (0, 24]");
}

double SolarTrace::interpolate(double t_h) const {
  if (time_h.empty()) return 0.0;
  if (t_h <= time_h.front()) return power_w.front();
  if (t_h >= time_h.back()) return power_w.back();
  const auto it = std::upper_bound(time_h.begin(), time_h.end(), t_h);
  const auto i = static_cast<std::size_t>(it - time_h.begin());
  const double w = (t_h - time_h[i - 1]) / (time_h[i] - time_h[i - 1]);
  return power_w[i - 1] + w * (power_w[i] - power_w[i - 1]);
}

SolarTrace parse_solar_trace(std::istream& in) {
  SolarTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("solar trace: missing header row");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IngestionError("solar trace line " + std::to_string(lineno) + ": expected time_h,power_w");
    double t = 0.0;
    double p = 0.0;
    try {
      std::size_t used = 0;
      t = std::stod(line.substr(0, comma), &used);
      p = std::stod(line.substr(comma + 1), &used);
    } catch (const std::exception&) {
      throw IngestionError("solar trace line " + std::to_string(lineno) + ": not a number");
    }
    if (!std::isfinite(t) || !std::isfinite(p) || p < 0.0)
      throw IngestionError("solar trace line " + std::to_string(lineno) + ": invalid value");
    if (!trace.time_h.empty() && !(t > trace.time_h.back()))
      throw IngestionError("solar trace line " + std::to_string(lineno) +
                           ": timestamps must be strictly increasing");
    trace.time_h.push_back(t);
    trace.power_w.push_back(p);
  }
  if (trace.time_h.empty()) throw IngestionError("solar trace: no data rows");
  if (trace.time_h.front() < 0.0) throw IngestionError("solar trace: negative timestamp");
  return trace;
}

SolarTrace load_solar_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open solar trace '" + path + "'");
  return parse_solar_trace(in);
}

namespace {

double parametric_power(const SolarParametric& m, double time_of_day_h) {
  // Phase since sunrise, wrapped so a window crossing midnight still works.
  double phase = std::fmod(time_of_day_h - m.sunrise_h + 24.0, 24.0);
  if (phase >= m.daylength_h) return 0.0;
  return m.rated_w * m.efficiency *
         std::max(0.0, std::sin(std::numbers::pi * phase / m.daylength_h));
}

}  // namespace

double harvest_power_solar(const HarvestModel& model, double time_of_day_h) {
  if (!(time_of_day_h >= 0.0 && time_of_day_h < 24.0))
    throw ContractViolation("time of day must lie in [0, 24)");
  if (const auto* p = std::get_if<SolarParametric>(&model)) return parametric_power(*p, time_of_day_h);
  if (const auto* t = std::get_if<SolarTrace>(&model)) return t->interpolate(time_of_day_h);
  throw ContractViolation("kinetic harvest model has no solar profile");
}

double solar_power_at(const HarvestModel& model, double sim_time_h) {
  if (const auto* t = std::get_if<SolarTrace>(&model); t != nullptr && !t->daily())
    return t->interpolate(sim_time_h);
  double tod = std::fmod(sim_time_h, 24.0);
  if (tod < 0.0) tod += 24.0;
  return harvest_power_solar(model, tod);
}

double beacon_average_current(double flash_current_ma, bool is_night) {
  if (!(flash_current_ma >= 0.0)) throw ContractViolation("flash current must be non-negative");
  return is_night ? flash_current_ma * 0.5 / 4.0 : 0.0;
}

}  // namespace harvestrl::energy
