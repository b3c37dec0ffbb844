#include "harvestrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "harvestrl/errors.hpp"

namespace harvestrl::config {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto l = lower(v);
  if (l == "true" || l == "on" || l == "yes" || l == "1") return true;
  if (l == "false" || l == "off" || l == "no" || l == "0") return false;
  throw ConfigError(key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

std::string_view bool_text(bool b) { return b ? "true" : "false"; }

// Reward parameters live in one shared block; each listed function picks
// the ones it uses.
struct RewardBlock {
  std::vector<std::string> names{"R1"};
  double beta = 0.3;
  std::array<double, 4> rho{1.0, 0.6, 0.3, 0.0};
  std::array<double, 3> t{0.75, 0.50, 0.25};

  static RewardBlock from(const std::vector<rewards::RewardSpec>& specs) {
    RewardBlock b;
    b.names.clear();
    bool beta_set = false;
    bool rho_set = false;
    for (const auto& s : specs) {
      b.names.emplace_back(rewards::name(s));
      if (const auto* r1 = std::get_if<rewards::R1>(&s); r1 && !beta_set) b.beta = r1->beta, beta_set = true;
      if (const auto* r2 = std::get_if<rewards::R2>(&s); r2 && !beta_set) b.beta = r2->beta, beta_set = true;
      if (const auto* r6 = std::get_if<rewards::R6>(&s); r6 && !rho_set) {
        b.rho = r6->rho;
        b.t = r6->thresholds;
        rho_set = true;
      }
    }
    return b;
  }

  std::vector<rewards::RewardSpec> build() const {
    if (names.empty()) throw ConfigError("reward.name", "at least one reward function is required");
    std::vector<rewards::RewardSpec> out;
    for (const auto& n : names) {
      auto spec = rewards::spec_from_name(n);
      if (auto* r1 = std::get_if<rewards::R1>(&spec)) r1->beta = beta;
      if (auto* r2 = std::get_if<rewards::R2>(&spec)) r2->beta = beta;
      if (auto* r6 = std::get_if<rewards::R6>(&spec)) {
        r6->rho = rho;
        r6->thresholds = t;
      }
      out.push_back(spec);
    }
    return out;
  }
};

struct WbanActionLists {
  std::vector<double> freq, period, current;

  static WbanActionLists from(const std::vector<energy::ActionSpec>& actions) {
    WbanActionLists l;
    for (const auto& a : actions) {
      l.freq.push_back(a.processor_freq_mhz);
      l.period.push_back(a.period_min);
      l.current.push_back(a.avg_current_ma);
    }
    return l;
  }

  std::vector<energy::ActionSpec> build() const {
    if (freq.size() != period.size() || freq.size() != current.size())
      throw ConfigError("wban.action_current_ma", "action lists must have equal lengths");
    if (freq.empty()) throw ConfigError("wban.action_current_ma", "action set must not be empty");
    const double min_period = *std::min_element(period.begin(), period.end());
    std::vector<energy::ActionSpec> out;
    for (std::size_t i = 0; i < freq.size(); ++i) {
      if (!(period[i] > 0.0)) throw ConfigError("wban.action_period_min", "periods must be positive");
      out.push_back({rl::ActionId{i}, static_cast<int>(i + 1), freq[i], period[i], current[i],
                     min_period / period[i]});
    }
    return out;
  }
};

// Parsing scratch state plus the config being filled.
struct State {
  ExperimentConfig cfg;
  RewardBlock reward;
  WbanActionLists wban_actions;
};

struct Field {
  std::string key;  // "section.name" or "name" at top level
  std::function<void(State&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const State&)> get;
};

#define HRL_DOUBLE(KEY, EXPR)                                                                    \
  Field {                                                                                        \
    KEY, [](State& s, const std::string& k, const std::string& v) { s.EXPR = to_double(k, v); }, \
        [](const State& s) { return format_double(s.EXPR); }                                     \
  }
#define HRL_INT(KEY, EXPR, T)                                                                  \
  Field {                                                                                      \
    KEY, [](State& s, const std::string& k, const std::string& v) { s.EXPR = to_int<T>(k, v); }, \
        [](const State& s) { return std::to_string(s.EXPR); }                                  \
  }
#define HRL_BOOL(KEY, EXPR)                                                                    \
  Field {                                                                                      \
    KEY, [](State& s, const std::string& k, const std::string& v) { s.EXPR = to_bool(k, v); }, \
        [](const State& s) { return std::string(bool_text(s.EXPR)); }                          \
  }
#define HRL_STRING(KEY, EXPR)                                                           \
  Field {                                                                               \
    KEY, [](State& s, const std::string&, const std::string& v) { s.EXPR = v; },        \
        [](const State& s) { return s.EXPR; }                                           \
  }
#define HRL_DOUBLES(KEY, EXPR)                                                                  \
  Field {                                                                                       \
    KEY, [](State& s, const std::string& k, const std::string& v) { s.EXPR = to_doubles(k, v); }, \
        [](const State& s) { return join(s.EXPR); }                                             \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"scenario",
       [](State& s, const std::string& k, const std::string& v) {
         const auto l = lower(v);
         if (l == "wban") s.cfg.scenario = ScenarioKind::Wban;
         else if (l == "buoy") s.cfg.scenario = ScenarioKind::Buoy;
         else throw ConfigError(k, "expected wban or buoy, got '" + v + "'");
       },
       [](const State& s) { return std::string(s.cfg.scenario == ScenarioKind::Wban ? "wban" : "buoy"); }},

      HRL_INT("rl.seed", cfg.seed, std::uint64_t),
      HRL_DOUBLE("rl.eps_max", cfg.agent.exploration.eps_max),
      HRL_DOUBLE("rl.eps_min", cfg.agent.exploration.eps_min),
      HRL_DOUBLE("rl.k", cfg.agent.exploration.k),
      HRL_DOUBLE("rl.zeta", cfg.agent.learning.zeta),
      HRL_DOUBLE("rl.gamma", cfg.agent.learning.gamma),
      HRL_BOOL("rl.learning", cfg.agent.learning_enabled),
      {"rl.forced_action",
       [](State& s, const std::string& k, const std::string& v) {
         if (lower(v) == "none") s.cfg.agent.forced_action.reset();
         else s.cfg.agent.forced_action = to_int<int>(k, v);
       },
       [](const State& s) {
         return s.cfg.agent.forced_action ? std::to_string(*s.cfg.agent.forced_action) : std::string("none");
       }},

      {"reward.name",
       [](State& s, const std::string&, const std::string& v) { s.reward.names = split_list(v); },
       [](const State& s) {
         std::string out;
         for (std::size_t i = 0; i < s.reward.names.size(); ++i) out += (i ? ", " : "") + s.reward.names[i];
         return out;
       }},
      HRL_DOUBLE("reward.beta", reward.beta),
      HRL_DOUBLE("reward.rho1", reward.rho[0]),
      HRL_DOUBLE("reward.rho2", reward.rho[1]),
      HRL_DOUBLE("reward.rho3", reward.rho[2]),
      HRL_DOUBLE("reward.rho4", reward.rho[3]),
      HRL_DOUBLE("reward.t1", reward.t[0]),
      HRL_DOUBLE("reward.t2", reward.t[1]),
      HRL_DOUBLE("reward.t3", reward.t[2]),

      HRL_INT("wban.duration_days", cfg.wban.duration_days, int),
      HRL_DOUBLE("wban.decision_period_min", cfg.wban.decision_period_min),
      HRL_DOUBLE("wban.activity_change_period_min", cfg.wban.activity_change_period_min),
      HRL_DOUBLE("wban.capacity_mah", cfg.wban.capacity_mah),
      HRL_DOUBLE("wban.initial_soc", cfg.wban.initial_soc),
      HRL_DOUBLE("wban.nominal_voltage_v", cfg.wban.nominal_voltage_v),
      {"wban.activity_mode",
       [](State& s, const std::string& k, const std::string& v) {
         const auto l = lower(v);
         using scenarios::ActivityMode;
         if (l == "iid-uniform") s.cfg.wban.activity_mode = ActivityMode::IidUniform;
         else if (l == "fixed-schedule") s.cfg.wban.activity_mode = ActivityMode::FixedSchedule;
         else if (l == "file") s.cfg.wban.activity_mode = ActivityMode::File;
         else throw ConfigError(k, "expected iid-uniform, fixed-schedule or file");
       },
       [](const State& s) {
         switch (s.cfg.wban.activity_mode) {
           case scenarios::ActivityMode::IidUniform: return std::string("iid-uniform");
           case scenarios::ActivityMode::FixedSchedule: return std::string("fixed-schedule");
           case scenarios::ActivityMode::File: return std::string("file");
         }
         return std::string();
       }},
      HRL_STRING("wban.activity_file", cfg.wban.activity_file),
      HRL_BOOL("wban.harvest", cfg.wban.harvest_enabled),
      HRL_DOUBLE("wban.harvest_relax_uw", cfg.wban.kinetic.power_uw[0]),
      HRL_DOUBLE("wban.harvest_walk_uw", cfg.wban.kinetic.power_uw[1]),
      HRL_DOUBLE("wban.harvest_run_uw", cfg.wban.kinetic.power_uw[2]),
      HRL_DOUBLE("wban.fm_relax_hz", cfg.wban.fm_hz[0]),
      HRL_DOUBLE("wban.fm_walk_hz", cfg.wban.fm_hz[1]),
      HRL_DOUBLE("wban.fm_run_hz", cfg.wban.fm_hz[2]),
      HRL_DOUBLE("wban.fm_max_hz", cfg.wban.fm_max_hz),
      HRL_DOUBLES("wban.action_freq_mhz", wban_actions.freq),
      HRL_DOUBLES("wban.action_period_min", wban_actions.period),
      HRL_DOUBLES("wban.action_current_ma", wban_actions.current),

      HRL_INT("buoy.duration_days", cfg.buoy.duration_days, int),
      HRL_DOUBLE("buoy.decision_period_min", cfg.buoy.decision_period_min),
      HRL_DOUBLE("buoy.capacity_mah", cfg.buoy.capacity_mah),
      HRL_DOUBLE("buoy.initial_soc", cfg.buoy.initial_soc),
      HRL_DOUBLE("buoy.nominal_voltage_v", cfg.buoy.nominal_voltage_v),
      HRL_DOUBLES("buoy.fs_levels", cfg.buoy.fs_levels),
      HRL_DOUBLES("buoy.soc_bands", cfg.buoy.state_spec.soc_thresholds),
      HRL_BOOL("buoy.day_night", cfg.buoy.state_spec.day_night),
      {"buoy.solar",
       [](State& s, const std::string& k, const std::string& v) {
         const auto l = lower(v);
         using scenarios::SolarMode;
         if (l == "parametric") s.cfg.buoy.solar_mode = SolarMode::Parametric;
         else if (l == "trace") s.cfg.buoy.solar_mode = SolarMode::Trace;
         else if (l == "off") s.cfg.buoy.solar_mode = SolarMode::Off;
         else throw ConfigError(k, "expected parametric, trace or off");
       },
       [](const State& s) {
         switch (s.cfg.buoy.solar_mode) {
           case scenarios::SolarMode::Parametric: return std::string("parametric");
           case scenarios::SolarMode::Trace: return std::string("trace");
           case scenarios::SolarMode::Off: return std::string("off");
         }
         return std::string();
       }},
      HRL_DOUBLE("buoy.solar_rated_w", cfg.buoy.solar.rated_w),
      HRL_DOUBLE("buoy.solar_efficiency", cfg.buoy.solar.efficiency),
      HRL_DOUBLE("buoy.sunrise_h", cfg.buoy.solar.sunrise_h),
      HRL_DOUBLE("buoy.daylength_h", cfg.buoy.solar.daylength_h),
      HRL_STRING("buoy.solar_trace_file", cfg.buoy.solar_trace_file),
      HRL_DOUBLE("buoy.anemometer_ma", cfg.buoy.load.anemometer.active_ma),
      HRL_DOUBLE("buoy.anemometer_duty", cfg.buoy.load.anemometer.active_fraction),
      HRL_DOUBLE("buoy.atmospheric_ma", cfg.buoy.load.atmospheric.active_ma),
      HRL_DOUBLE("buoy.atmospheric_duty", cfg.buoy.load.atmospheric.active_fraction),
      HRL_DOUBLE("buoy.radio_ma", cfg.buoy.load.radio.active_ma),
      HRL_DOUBLE("buoy.radio_duty", cfg.buoy.load.radio.active_fraction),
      HRL_DOUBLE("buoy.mcu_freq_mhz", cfg.buoy.load.mcu_freq_mhz),
      HRL_DOUBLE("buoy.mcu_duty", cfg.buoy.load.mcu_active_fraction),
      HRL_DOUBLE("buoy.beacon_flash_ma", cfg.buoy.load.beacon_flash_ma),
      HRL_INT("buoy.substeps", cfg.buoy.substeps, int),

      HRL_STRING("output.dir", cfg.out_dir),
      HRL_INT("output.sweep", cfg.sweep, std::size_t),
  };
  return table;
}

#undef HRL_DOUBLE
#undef HRL_INT
#undef HRL_BOOL
#undef HRL_STRING
#undef HRL_DOUBLES

std::string render(const State& s) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = dot == std::string::npos ? "" : f.key.substr(0, dot);
    const std::string name = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (sec != section) {
      out << "\n[" << sec << "]\n";
      section = sec;
    }
    out << name << " = " << f.get(s) << "\n";
  }
  return out.str();
}

State state_of(const ExperimentConfig& cfg) {
  State s;
  s.cfg = cfg;
  s.reward = RewardBlock::from(cfg.rewards);
  s.wban_actions = WbanActionLists::from(cfg.wban.actions);
  return s;
}

}  // namespace

scenarios::ScenarioConfig ExperimentConfig::scenario_config(std::size_t reward_index) const {
  const auto& reward = rewards.at(reward_index);
  if (scenario == ScenarioKind::Wban) {
    auto c = wban;
    c.agent = agent;
    c.reward = reward;
    return c;
  }
  auto c = buoy;
  c.agent = agent;
  c.reward = reward;
  return c;
}

void ExperimentConfig::validate() const {
  if (rewards.empty()) throw ConfigError("reward.name", "at least one reward function is required");
  if (sweep < 1) throw ConfigError("output.sweep", "must be at least 1");
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const auto sc = scenario_config(i);
    std::visit([](const auto& c) { c.validate(); }, sc);
  }
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;

  State s;
  s.wban_actions = WbanActionLists::from(s.cfg.wban.actions);
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigParseError("line " + std::to_string(lineno) + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known{"rl", "reward", "wban", "buoy", "output"};
      if (!known.count(section)) throw ConfigError(section, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string name = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (name.empty()) throw ConfigParseError("line " + std::to_string(lineno) + ": empty key");
    const std::string key = section.empty() ? name : section + "." + name;
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    it->second->set(s, key, value);
  }

  s.cfg.rewards = s.reward.build();
  s.cfg.wban.actions = s.wban_actions.build();
  s.cfg.validate();
  return s.cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize(const ExperimentConfig& cfg) { return render(state_of(cfg)); }

void override_rewards(ExperimentConfig& cfg, const std::string& names) {
  auto block = RewardBlock::from(cfg.rewards);
  block.names = split_list(names);
  cfg.rewards = block.build();
}

std::string serialize(const scenarios::ScenarioConfig& sc) {
  ExperimentConfig cfg;
  cfg.seed = 0;
  if (const auto* w = std::get_if<scenarios::WbanScenarioConfig>(&sc)) {
    cfg.scenario = ScenarioKind::Wban;
    cfg.wban = *w;
    cfg.agent = w->agent;
    cfg.rewards = {w->reward};
  } else {
    const auto& b = std::get<scenarios::BuoyScenarioConfig>(sc);
    cfg.scenario = ScenarioKind::Buoy;
    cfg.buoy = b;
    cfg.agent = b.agent;
    cfg.rewards = {b.reward};
  }
  return serialize(cfg);
}

std::uint64_t fingerprint(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t scenario_fingerprint(const scenarios::ScenarioConfig& cfg) {
  return fingerprint(serialize(cfg));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace harvestrl::config
