#include <string>

#include "doctest.h"
#include "harvestrl/config.hpp"
#include "harvestrl/errors.hpp"

using namespace harvestrl;
using namespace harvestrl::config;

namespace {

std::string key_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto cfg = parse_config("scenario = wban\n[reward]\nname = R1\nbeta = 0.3\n");
  CHECK(cfg.scenario == ScenarioKind::Wban);
  CHECK(cfg.agent.learning.gamma == 0.8);
  CHECK(cfg.wban.capacity_mah == 100.0);
  CHECK(cfg.wban.duration_days == 7);
  REQUIRE(cfg.rewards.size() == 1);
  CHECK(std::get<rewards::R1>(cfg.rewards[0]).beta == 0.3);
  const auto sc = cfg.scenario_config();
  CHECK(std::get<scenarios::WbanScenarioConfig>(sc).epochs() == 504);
}

TEST_CASE("invalid values name their key") {
  CHECK(key_of("scenario = wban\n[reward]\nname = R1\nbeta = 1.5\n") == "reward.beta");
  CHECK(key_of("scenario = buoy\n[reward]\nname = R6\nrho1 = 0.5\nrho2 = 0.6\n") == "reward.rho2");
  CHECK(message_of("scenario = buoy\n[reward]\nname = R6\nrho1 = 0.5\nrho2 = 0.6\n").find("ordering invariant") !=
        std::string::npos);
  CHECK(key_of("scenario = boat\n") == "scenario");
  CHECK(key_of("[rl]\ngamma = 1\n") == "rl.gamma");
  CHECK(key_of("[rl]\nwarp = 9\n") == "rl.warp");
  CHECK(key_of("[rl]\ngamma = 0.5\ngamma = 0.6\n") == "rl.gamma");
  CHECK(key_of("[moon]\n") == "moon");
  CHECK(key_of("[wban]\ncapacity_mah = lots\n") == "wban.capacity_mah");
  CHECK(key_of("[reward]\nname = R9\n") == "reward.name");
  CHECK(key_of("[rl]\nforced_action = 7\n") == "rl.forced_action");
  CHECK(key_of("[wban]\ndecision_period_min = 11\n") == "wban.decision_period_min");
  CHECK(key_of("[output]\nsweep = 0\n") == "output.sweep");
}

TEST_CASE("malformed syntax is a parse error") {
  CHECK_THROWS_AS(parse_config("scenario wban\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("[rl\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config(" = 3\n"), ConfigParseError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), IoError);
}

TEST_CASE("comments, case and whitespace") {
  const auto cfg = parse_config(
      "# experiment\n"
      "scenario = BUOY   ; inline\n"
      "\n"
      "[RL]\n"
      "  Seed = 42\n"
      "[reward]\n"
      "name = r6, R7\n"
      "[buoy]\n"
      "capacity_mah = 3200\n");
  CHECK(cfg.scenario == ScenarioKind::Buoy);
  CHECK(cfg.seed == 42);
  REQUIRE(cfg.rewards.size() == 2);
  CHECK(rewards::name(cfg.rewards[0]) == "R6");
  CHECK(cfg.buoy.capacity_mah == 3200.0);
}

TEST_CASE("serialization round trip") {
  const auto cfg = parse_config(
      "scenario = buoy\n"
      "[rl]\nseed = 9\neps_min = 0.07\nforced_action = 2\nlearning = false\n"
      "[reward]\nname = R6, R7\nrho2 = 0.55\nt3 = 0.2\n"
      "[buoy]\ncapacity_mah = 3200\nfs_levels = 0.2, 0.6, 1\nday_night = false\nradio_duty = 0.3\n"
      "[output]\nsweep = 4\ndir = somewhere\n");
  const std::string text = serialize(cfg);
  const auto back = parse_config(text);
  CHECK(serialize(back) == text);
  CHECK(back.seed == 9);
  CHECK(back.agent.forced_action == std::optional<int>(2));
  CHECK_FALSE(back.agent.learning_enabled);
  CHECK(std::get<rewards::R6>(back.rewards[0]).rho[1] == 0.55);
  CHECK(std::get<rewards::R6>(back.rewards[0]).thresholds[2] == 0.2);
  CHECK(back.buoy.fs_levels == std::vector<double>{0.2, 0.6, 1.0});
  CHECK_FALSE(back.buoy.state_spec.day_night);
  CHECK(back.buoy.load.radio.active_fraction == 0.3);
  CHECK(back.sweep == 4);
  CHECK(back.out_dir == "somewhere");

  const auto wban = parse_config(serialize(ExperimentConfig{}));
  CHECK(serialize(wban) == serialize(ExperimentConfig{}));
}

TEST_CASE("wban action lists") {
  const auto cfg = parse_config(
      "[wban]\naction_freq_mhz = 32, 1\naction_period_min = 1, 60\naction_current_ma = 0.6, 0.2\n");
  REQUIRE(cfg.wban.actions.size() == 2);
  CHECK(cfg.wban.actions[1].period_min == 60.0);
  CHECK(cfg.wban.actions[1].number == 2);
  CHECK(key_of("[wban]\naction_freq_mhz = 32\n") == "wban.action_current_ma");
}

TEST_CASE("fingerprints") {
  CHECK(fingerprint("") == 0xcbf29ce484222325ULL);
  CHECK(fingerprint("a") == 0xaf63dc4c8601ec8cULL);
  const scenarios::ScenarioConfig a = scenarios::WbanScenarioConfig{};
  auto b = a;
  std::get<scenarios::WbanScenarioConfig>(b).capacity_mah = 101.0;
  CHECK(scenario_fingerprint(a) == scenario_fingerprint(a));
  CHECK(scenario_fingerprint(a) != scenario_fingerprint(b));
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 5200.0, -0.0, 0.6278}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("reward override keeps parameters") {
  auto cfg = parse_config("[reward]\nname = R1\nbeta = 0.4\n");
  override_rewards(cfg, "R2, R5");
  REQUIRE(cfg.rewards.size() == 2);
  CHECK(std::get<rewards::R2>(cfg.rewards[0]).beta == 0.4);
  CHECK_THROWS_AS(override_rewards(cfg, "R0"), ConfigError);
}
