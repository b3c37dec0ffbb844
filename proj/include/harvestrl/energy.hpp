#pragma once

#include <array>
#include <istream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "harvestrl/rl_core.hpp"

namespace harvestrl::energy {

inline constexpr double kDefaultNominalVoltage = 3.0;

// Ideal battery: no leakage, no charge inefficiency.
class Battery {
public:
  Battery(double capacity_mah, double charge_mah, double nominal_voltage_v = kDefaultNominalVoltage);
  static Battery from_soc(double capacity_mah, double soc,
                          double nominal_voltage_v = kDefaultNominalVoltage);

  double capacity_mah() const noexcept { return capacity_mah_; }
  double charge_mah() const noexcept { return charge_mah_; }
  double nominal_voltage_v() const noexcept { return nominal_voltage_v_; }
  double soc() const noexcept { return charge_mah_ / capacity_mah_; }
  bool empty() const noexcept { return charge_mah_ <= 0.0; }

  friend bool operator==(const Battery&, const Battery&) = default;

private:
  double capacity_mah_;
  double charge_mah_;
  double nominal_voltage_v_;
};

double harvest_current_ma(double harvest_w, double nominal_voltage_v);

// charge' = clamp(charge + (harvest_ma - load_ma) * dt_h, 0, capacity)
Battery step_battery(const Battery& b, double load_ma, double harvest_w, double dt_h);

// A duty-cycled component: it sits at sleep_ma and spends `active_fraction`
// of the time at active_ma when driven at full rate.
struct ComponentLoad {
  std::string name;
  double active_ma = 0.0;
  double sleep_ma = 0.0;
  double active_fraction = 1.0;

  void validate() const;
  // Average current when the duty is scaled by `rate` in [0, 1].
  double average_ma(double rate) const;
};

// MCU active current: 225 uA per MHz; sleep 0.93 uA.
inline constexpr double kMcuActiveMaPerMhz = 0.225;
inline constexpr double kMcuSleepMa = 0.00093;

struct ActionSpec {
  rl::ActionId id;
  int number = 0;  // 1-based label used in tables and configs
  double processor_freq_mhz = 0.0;
  double period_min = 1.0;
  double avg_current_ma = 0.0;
  double fs_norm = 0.0;

  void validate() const;
};

// The five body-sensor operating modes with their measured average currents.
std::vector<ActionSpec> wban_default_actions();

// Configured average current of action `number`; ConfigError when absent.
double action_average_current(std::span<const ActionSpec> actions, int number);

enum class Activity { Relax = 0, Walk = 1, Run = 2 };

inline constexpr std::array<Activity, 3> kActivities{Activity::Relax, Activity::Walk, Activity::Run};

std::string_view activity_name(Activity a);
Activity activity_from_name(std::string_view name);  // IngestionError when unknown

// Run if fm > 2 Hz, Walk if 1 < fm <= 2, Relax otherwise.
Activity activity_from_fm(double fm_hz);

struct KineticHarvest {
  std::array<double, 3> power_uw{2.4, 180.3, 678.3};

  double power_at(Activity a) const { return power_uw[static_cast<std::size_t>(a)]; }
};

// Harvested power of the kinetic generator for the default table, in microwatts.
double harvest_power_kinetic(Activity a);

struct SolarParametric {
  double rated_w = 20.0;  // two 10 W panels
  double efficiency = 0.1;
  double sunrise_h = 7.0;
  double daylength_h = 12.0;

  void validate() const;
};

// Piecewise-linear power series, strictly increasing timestamps. A series
// whose last timestamp is <= 24 h is a daily profile; otherwise it is indexed
// by absolute simulation time. Outside the sampled range the nearest
// endpoint value is held.
struct SolarTrace {
  std::vector<double> time_h;
  std::vector<double> power_w;

  bool daily() const { return !time_h.empty() && time_h.back() <= 24.0; }
  double interpolate(double t_h) const;
};

// Two-column CSV `time_h,power_w` with a header row.
SolarTrace parse_solar_trace(std::istream& in);
SolarTrace load_solar_trace(const std::string& path);

using HarvestModel = std::variant<KineticHarvest, SolarParametric, SolarTrace>;

// Solar harvest at a time of day in [0, 24). Kinetic models are rejected.
double harvest_power_solar(const HarvestModel& model, double time_of_day_h);

// Solar harvest at absolute simulation time (hours since midnight of day 0).
double solar_power_at(const HarvestModel& model, double sim_time_h);

// Beacon flashes 500 ms every 4 s while it is dark.
double beacon_average_current(double flash_current_ma, bool is_night);

}  // namespace harvestrl::energy
